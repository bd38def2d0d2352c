#include "apernet/kernels.hpp"

#include <cmath>

namespace apernet::kernels {

namespace {

void mul_rweight_scalar(double* w, double base, double step, double clip, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double t = base + static_cast<double>(j) * step;
    double a = std::fabs(t);
    double f;
    if (a > clip) {
      f = 0.0;
    } else {
      double r = 1.0 / a;  // a == 0 gives inf, capped below
      f = r < 1.0 ? r : 1.0;
    }
    w[j] *= f;
  }
}

void mul_recip_abs_scalar(double* w, double base, double step, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double t = base + static_cast<double>(j) * step;
    w[j] *= 1.0 / std::fabs(t);
  }
}

void min_abs_scalar(double base, double step, std::size_t n, double* min_out,
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

const Ops& scalar_ops() {
  static const Ops ops{"scalar", &mul_rweight_scalar, &mul_recip_abs_scalar, &min_abs_scalar};
  return ops;
}

double sum_pairwise(const double* w, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j];
    return s;
  }
  std::size_t h = n / 2;
  return sum_pairwise(w, h) + sum_pairwise(w + h, n - h);
}

}  // namespace apernet::kernels
