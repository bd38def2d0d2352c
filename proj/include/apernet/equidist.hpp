#pragma once

#include "apernet/fitting.hpp"
#include "apernet/geometry.hpp"
#include "apernet/netgen.hpp"

#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

namespace apernet {

using TorusTarget = std::variant<Box, Parallelotope>;

struct BirkhoffQuery {
  FlowSpec flow;
  TorusTarget target;
  double T;
};

double target_volume(const TorusTarget& t);

// Exact Birkhoff integral for d = 1 over an aligned-box target, by sweeping
// all boundary-crossing times of the periodic per-coordinate constraints.
double birkhoff_exact_1d(const BirkhoffQuery& q);

struct Estimate {
  double value;
  double error_bound;
};

// Randomly-shifted Halton QMC estimate of N_T with an empirical error bound
// from the spread over the shift replicates.
Estimate birkhoff_estimate(const BirkhoffQuery& q, std::uint64_t seed, int points_per_rep = 4096,
                           int replicates = 16);

// prod_i integral_{-T}^{T} e((m.v_i) s) ds; each factor sin(2 pi w T)/(pi w),
// with the 2T limit applied below the resonance tolerance.
std::complex<double> exp_integral(const IVec& m, const FlowSpec& flow, double T);

inline constexpr double kResonanceTol = 1e-12;

struct EtBound {
  double leading;
  double sum_term;
  double total() const { return leading + sum_term; }
};

// |B_T|/M plus the r-weighted exponential-integral sum over 0 < ||m|| <= M.
EtBound erdos_turan_bound(const Box& target, const FlowSpec& flow, double T, double M);

// Parallelotope version: (1+2b)^k |det L| (|B_T|/M + sum over ||L^t m|| <= M
// of r_T(m) |exp_integral|).
EtBound nt_estimate_bound(const Parallelotope& target, const FlowSpec& flow, double T, double M);

// | #(Y and E) - lambda |E| | with half-open counting; E must sit inside the
// generation window.
double discrete_discrepancy(const PointSet& Y, const Box& E, double lambda);

// sup over grid-aligned cubes of side rho inside the window of
// Disc(B, lambda) / (lambda |B|).
double dy_sup(const PointSet& Y, long rho, double lambda, const Box& window);

struct MRule {
  double exponent = 0.0;  // M = max(1, floor(T^exponent))
  long apply(double T) const;
};

struct DiscrepancyRow {
  double T;
  double NT;
  double volume_term;
  double abs_diff;
  double bound_leading;
  double bound_sum;
  long M;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyRow> rows;
  LineFit slope;       // log|diff| vs log T, rows with |diff| < 1e-12 excluded
  bool degenerate = false;
  std::uint64_t seed = 0;
};

DiscrepancyReport discrepancy_scan(const FlowSpec& flow, const TorusTarget& target,
                                   const std::vector<double>& T_list, const MRule& m_rule,
                                   std::uint64_t seed);

}  // namespace apernet
