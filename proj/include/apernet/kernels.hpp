#pragma once

#include <cstddef>
#include <vector>

namespace apernet::kernels {

// Inner-loop kernels for frequency-ball sweeps. Every argument sequence is
// affine in the lane index: t(j) = base + j*step, evaluated as mul-then-add in
// all variants so the scalar and SIMD paths agree bit for bit. Summation is
// never done inside a dispatched kernel; callers reduce with sum_pairwise.
struct Ops {
  const char* name;

  // w[j] *= f(t(j)) with f(t) = (|t| <= clip) ? min(1, 1/|t|) : 0.
  // The |t| = 0 lane yields factor 1 (min caps the infinity).
  void (*mul_rweight)(double* w, double base, double step, double clip, std::size_t n);

  // w[j] *= 1 / |t(j)|. Caller is responsible for excluding zero dots.
  void (*mul_recip_abs)(double* w, double base, double step, std::size_t n);

  // Minimum of |t(j)| over j in [0, n) and the smallest attaining index.
  void (*min_abs)(double base, double step, std::size_t n, double* min_out,
                  std::size_t* argmin_out);
};

const Ops& scalar_ops();
#if defined(APERNET_HAVE_AVX2)
const Ops& avx2_ops();
#endif
#if defined(APERNET_HAVE_NEON)
const Ops& neon_ops();
#endif

// Selected at first use: APERNET_KERNELS=scalar|avx2|neon|auto overrides the
// CPU probe.
const Ops& active_ops();

// All variants compiled into this binary (scalar first).
std::vector<const Ops*> available_ops();

// Fixed-shape pairwise reduction; the tree depends only on n.
double sum_pairwise(const double* w, std::size_t n);

}  // namespace apernet::kernels
