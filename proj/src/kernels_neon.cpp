#include "apernet/kernels.hpp"

#if defined(APERNET_HAVE_NEON)

#include <arm_neon.h>

#include <cmath>

namespace apernet::kernels {

namespace {

void mul_rweight_neon(double* w, double base, double step, double clip, std::size_t n) {
  const float64x2_t vbase = vdupq_n_f64(base);
  const float64x2_t vstep = vdupq_n_f64(step);
  const float64x2_t vclip = vdupq_n_f64(clip);
  const float64x2_t ones = vdupq_n_f64(1.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    double idx[2] = {static_cast<double>(j), static_cast<double>(j + 1)};
    float64x2_t t = vaddq_f64(vbase, vmulq_f64(vld1q_f64(idx), vstep));
    float64x2_t a = vabsq_f64(t);
    float64x2_t r = vdivq_f64(ones, a);
    float64x2_t f = vminq_f64(ones, r);
    uint64x2_t keep = vcleq_f64(a, vclip);
    f = vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(f), keep));
    vst1q_f64(w + j, vmulq_f64(vld1q_f64(w + j), f));
  }
  for (; j < n; ++j) {
    double t = base + static_cast<double>(j) * step;
    double a = std::fabs(t);
    double f;
    if (a > clip) {
      f = 0.0;
    } else {
      double r = 1.0 / a;
      f = r < 1.0 ? r : 1.0;
    }
    w[j] *= f;
  }
}

void mul_recip_abs_neon(double* w, double base, double step, std::size_t n) {
  const float64x2_t vbase = vdupq_n_f64(base);
  const float64x2_t vstep = vdupq_n_f64(step);
  const float64x2_t ones = vdupq_n_f64(1.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    double idx[2] = {static_cast<double>(j), static_cast<double>(j + 1)};
    float64x2_t t = vaddq_f64(vbase, vmulq_f64(vld1q_f64(idx), vstep));
    float64x2_t r = vdivq_f64(ones, vabsq_f64(t));
    vst1q_f64(w + j, vmulq_f64(vld1q_f64(w + j), r));
  }
  for (; j < n; ++j) {
    double t = base + static_cast<double>(j) * step;
    w[j] *= 1.0 / std::fabs(t);
  }
}

void min_abs_neon(double base, double step, std::size_t n, double* min_out,
                  std::size_t* argmin_out) {
  double best = HUGE_VAL;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double t = base + static_cast<double>(j) * step;
    double a = std::fabs(t);
    if (a < best) {
      best = a;
      arg = j;
    }
  }
  *min_out = best;
  *argmin_out = arg;
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops{"neon", &mul_rweight_neon, &mul_recip_abs_neon, &min_abs_neon};
  return ops;
}

}  // namespace apernet::kernels

#endif  // APERNET_HAVE_NEON
