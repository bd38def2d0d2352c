#pragma once

#include "apernet/fitting.hpp"
#include "apernet/geometry.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace apernet {

struct DiophRow {
  double M;
  double min_abs;    // min over 0 < ||m|| <= M of |m . v|
  IVec argmin;       // lex-positive representative
  bool resonant;     // min below the resonance tolerance
};

struct DiophProfile {
  std::vector<DiophRow> rows;
  LineFit exponent_fit;  // -log(min) vs log ||argmin||, first row excluded
  double s_est = 0.0;
};

DiophProfile dioph_profile(const Vec& v, const std::vector<double>& M_list);

// Thrown when the strongly-Diophantine sum hits an exact resonance; the sum
// itself would be infinite.
struct ResonanceError : std::runtime_error {
  std::vector<IVec> witnesses;
  explicit ResonanceError(std::vector<IVec> w);
};

// sum over 0 < ||m|| <= M of r_T(m) prod_i 1/|m . v_i|. vs holds v_1..v_d as
// columns of a k x d matrix; basisT is the k x k basis defining r_T.
// Resonant m (|m.v_i| < 1e-12) raise ResonanceError with witnesses.
double strongly_dioph_sum(const Mat& vs, const Basis& basisT, double M, bool allow_large = false);

// Same sum with resonant frequencies dropped; their witnesses are reported.
struct ExcludedSum {
  double sum;
  std::vector<IVec> excluded;
};
ExcludedSum strongly_dioph_sum_excluding(const Mat& vs, const Basis& basisT, double M,
                                         bool allow_large = false);

struct GrowthFit {
  double eps_est;                  // slope of log sum vs log M (first row excluded)
  std::vector<double> log_trend;   // sum / (log M)^(k+2d+delta) per row
  bool trend_non_increasing;       // checked from the second row on
};

GrowthFit growth_fit(const std::vector<std::pair<double, double>>& sums, int k, int d,
                     double delta = 1.0);

// Nonzero m with ||m|| <= M and max_i |m . v_i| < 1e-9, if one exists
// (lex-positive scan order).
std::optional<IVec> irrationality_witness(const Mat& V_basis, double M);

}  // namespace apernet
