#include "apernet/kernels.hpp"

#if defined(APERNET_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace apernet::kernels {

namespace {

// j-lane offsets as doubles; exact for every index we use
inline __m256d lane_index(std::size_t j0) {
  return _mm256_setr_pd(static_cast<double>(j0), static_cast<double>(j0 + 1),
                        static_cast<double>(j0 + 2), static_cast<double>(j0 + 3));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

void mul_rweight_avx2(double* w, double base, double step, double clip, std::size_t n) {
  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d vclip = _mm256_set1_pd(clip);
  const __m256d ones = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d t = _mm256_add_pd(vbase, _mm256_mul_pd(lane_index(j), vstep));
    __m256d a = _mm256_and_pd(t, kAbsMask);
    __m256d r = _mm256_div_pd(ones, a);
    __m256d f = _mm256_min_pd(ones, r);
    __m256d keep = _mm256_cmp_pd(a, vclip, _CMP_LE_OQ);
    f = _mm256_and_pd(f, keep);
    _mm256_storeu_pd(w + j, _mm256_mul_pd(_mm256_loadu_pd(w + j), f));
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

void mul_recip_abs_avx2(double* w, double base, double step, std::size_t n) {
  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d ones = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d t = _mm256_add_pd(vbase, _mm256_mul_pd(lane_index(j), vstep));
    __m256d a = _mm256_and_pd(t, kAbsMask);
    __m256d r = _mm256_div_pd(ones, a);
    _mm256_storeu_pd(w + j, _mm256_mul_pd(_mm256_loadu_pd(w + j), r));
  }
  for (; j < n; ++j) {
    double t = base + static_cast<double>(j) * step;
    w[j] *= 1.0 / std::fabs(t);
  }
}

void min_abs_avx2(double base, double step, std::size_t n, double* min_out,
                  std::size_t* argmin_out) {
  double best = HUGE_VAL;
  std::size_t arg = 0;
  std::size_t j = 0;
  if (n >= 8) {
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d vstep = _mm256_set1_pd(step);
    __m256d vbest = _mm256_set1_pd(HUGE_VAL);
    for (; j + 4 <= n; j += 4) {
      __m256d t = _mm256_add_pd(vbase, _mm256_mul_pd(lane_index(j), vstep));
      __m256d a = _mm256_and_pd(t, kAbsMask);
      // strict-less mask: a block improves only if it beats the running min,
      // which preserves the first-attaining-index semantics after the rescan
      __m256d lt = _mm256_cmp_pd(a, vbest, _CMP_LT_OQ);
      if (_mm256_movemask_pd(lt)) {
        double lanes[4];
        _mm256_storeu_pd(lanes, a);
        for (int l = 0; l < 4; ++l) {
          if (lanes[l] < best) {
            best = lanes[l];
            arg = j + static_cast<std::size_t>(l);
          }
        }
        vbest = _mm256_set1_pd(best);
      }
    }
  }
  for (; j < n; ++j) {
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

const Ops& avx2_ops() {
  static const Ops ops{"avx2", &mul_rweight_avx2, &mul_recip_abs_avx2, &min_abs_avx2};
  return ops;
}

}  // namespace apernet::kernels

#endif  // APERNET_HAVE_AVX2
