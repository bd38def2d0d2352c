#pragma once

#include "apernet/geometry.hpp"

#include <complex>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace apernet {

// Beurling's entire approximations to sgn: b(x) <= sgn(x) <= B(x),
// both of exponential type 2*pi, with integral defect 1 each.
double beurling_major(double x);  // H + K
double beurling_minor(double x);  // H - K
double vaaler_H(double x);
double fejer_K(double x);

// One-dimensional Selberg pair for the interval [-half_width, half_width]
// at degree M: minorant <= indicator <= majorant pointwise, transforms vanish
// for |xi| >= M, and both L1 defects equal 1/M.
class SelbergPair {
 public:
  SelbergPair(double half_width, int degree);

  double half_width() const { return w_; }
  int degree() const { return M_; }

  double majorant(double x) const;  // C_I
  double minorant(double x) const;  // c_I
  double majorant_hat(double xi) const;
  double minorant_hat(double xi) const;

 private:
  double w_;
  int M_;
};

SelbergPair build_selberg_pair(double half_width, int degree);

// Product majorant G_B(x) = prod C_j(x_j) and the Selberg minorant
// g_B = -(k-1) G_B + sum_i c_i prod_{j != i} C_j for B = prod [-b_j, b_j].
double majorant_G(const Vec& half_widths, int M, const Vec& x);
double minorant_g(const Vec& half_widths, int M, const Vec& x);

// Real-valued trigonometric polynomial with sparse integer-frequency support
// inside {m : ||L^t m|| <= M}. Coefficients at m and -m are conjugate.
struct TrigPolynomial {
  int k = 0;
  Mat L;
  int M = 0;
  Vec offset;
  // sorted lexicographically by frequency
  std::vector<std::pair<IVec, std::complex<double>>> coeffs;

  std::complex<double> coefficient(const IVec& m) const;
  double l1_mass() const;
  nlohmann::json to_json() const;
  static TrigPolynomial from_json(const nlohmann::json& j);
};

// (majorant, minorant) pair sandwiching the torus indicator of U
std::pair<TrigPolynomial, TrigPolynomial> build_trig_pair(const Parallelotope& U, int M);

double eval_trig(const TrigPolynomial& p, const Vec& x);
// grouped evaluation sharing a phase table along the last coordinate
std::vector<double> eval_trig_many(const TrigPolynomial& p, const std::vector<Vec>& xs);

// Truncation radius for the direct periodization sum_n G_B(L^{-1}(x+n));
// adaptive doubling until the increment drops below tol/4.
long periodization_radius(const Parallelotope& U, int M, const Vec& x, double tol);
double periodized_majorant(const Parallelotope& U, int M, const Vec& x, long N);

}  // namespace apernet
