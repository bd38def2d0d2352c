#include "apernet/diophantine.hpp"

#include "apernet/freqsweep.hpp"
#include "apernet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace apernet {

namespace {

constexpr double kResTol = 1e-12;

void check_desk_scale(int k, double M, bool allow_large) {
  if (allow_large) return;
  double terms = std::pow(2.0 * std::floor(M) + 1.0, k);
  if (k > 4 || M > 256.0 || terms > 2e8)
    throw std::invalid_argument(
        "strongly_dioph_sum: beyond desk-scale caps (k <= 4, M <= 256); pass allow_large");
}

// Visit lex-positive prefixes (first nonzero coordinate positive, or all
// zero) of length k-1 and hand the inner row to fn. A zero prefix restricts
// the inner range to [1, M].
void half_space_rows(int k, long Mi,
                     const std::function<void(const std::vector<long>&, long, long)>& fn) {
  if (k == 1) {
    std::vector<long> none;
    fn(none, 1, Mi);
    return;
  }
  std::vector<long> prefix(static_cast<std::size_t>(k - 1), 0);
  std::function<void(int, bool)> rec = [&](int pos, bool zero_so_far) {
    if (pos == k - 1) {
      if (zero_so_far)
        fn(prefix, 1, Mi);
      else
        fn(prefix, -Mi, Mi);
      return;
    }
    long lo = zero_so_far ? 0 : -Mi;
    for (long v = lo; v <= Mi; ++v) {
      prefix[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, zero_so_far && v == 0);
    }
  };
  rec(0, true);
}

double affine_base(const Vec& coeffs, const std::vector<long>& prefix, long j0) {
  double base = static_cast<double>(j0) * coeffs[coeffs.size() - 1];
  for (std::size_t c = 0; c < prefix.size(); ++c)
    base += static_cast<double>(prefix[c]) * coeffs[static_cast<Eigen::Index>(c)];
  return base;
}

}  // namespace

DiophProfile dioph_profile(const Vec& v, const std::vector<double>& M_list) {
  if (v.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("dioph_profile: v must be nonzero");
  int k = static_cast<int>(v.size());
  DiophProfile out;
  const auto& ops = kernels::active_ops();
  for (double M : M_list) {
    long Mi = static_cast<long>(std::floor(M));
    if (Mi < 1) throw std::invalid_argument("dioph_profile: M >= 1 required");
    double best = HUGE_VAL;
    IVec arg = IVec::Zero(k);
    half_space_rows(k, Mi, [&](const std::vector<long>& prefix, long j0, long j1) {
      double base = affine_base(v, prefix, j0);
      double m;
      std::size_t a;
      ops.min_abs(base, v[k - 1], static_cast<std::size_t>(j1 - j0 + 1), &m, &a);
      if (m < best) {
        best = m;
        for (int i = 0; i < k - 1; ++i)
          arg[i] = static_cast<int>(prefix[static_cast<std::size_t>(i)]);
        arg[k - 1] = static_cast<int>(j0 + static_cast<long>(a));
      }
    });
    out.rows.push_back({M, best, arg, best < kResTol});
  }
  std::vector<std::pair<double, double>> fitpts;
  IVec last;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {  // smallest M is transient
    const auto& r = out.rows[i];
    if (r.resonant) continue;
    if (last.size() && r.argmin == last) continue;  // same witness, no new information
    last = r.argmin;
    double norm = static_cast<double>(r.argmin.cwiseAbs().maxCoeff());
    fitpts.emplace_back(std::log(norm), -std::log(r.min_abs));
  }
  out.exponent_fit = fit_line(fitpts);
  out.s_est = out.exponent_fit.slope;
  return out;
}

ResonanceError::ResonanceError(std::vector<IVec> w)
    : std::runtime_error([&w] {
        std::ostringstream ss;
        ss << "strongly_dioph_sum: exact resonance at " << w.size() << " frequencie(s):";
        for (std::size_t i = 0; i < w.size() && i < 4; ++i) {
          ss << " (";
          for (Eigen::Index j = 0; j < w[i].size(); ++j) ss << (j ? "," : "") << w[i][j];
          ss << ")";
        }
        return ss.str();
      }()),
      witnesses(std::move(w)) {}

namespace {

std::vector<IVec> resonance_prescan(const Mat& vs, long Mi) {
  int k = static_cast<int>(vs.rows());
  int d = static_cast<int>(vs.cols());
  std::vector<IVec> hits;
  half_space_rows(k, Mi, [&](const std::vector<long>& prefix, long j0, long j1) {
    for (int i = 0; i < d; ++i) {
      Vec vi = vs.col(i);
      double base = affine_base(vi, prefix, j0);
      double m;
      std::size_t a;
      kernels::active_ops().min_abs(base, vi[k - 1], static_cast<std::size_t>(j1 - j0 + 1), &m,
                                    &a);
      if (m < kResTol) {
        for (long j = j0; j <= j1 && hits.size() < 16; ++j) {
          double dot = base + static_cast<double>(j - j0) * vi[k - 1];
          if (std::abs(dot) < kResTol) {
            IVec w(k);
            for (int c = 0; c < k - 1; ++c)
              w[c] = static_cast<int>(prefix[static_cast<std::size_t>(c)]);
            w[k - 1] = static_cast<int>(j);
            if (std::find(hits.begin(), hits.end(), w) == hits.end()) hits.push_back(w);
          }
        }
      }
    }
  });
  return hits;
}

double sum_body(const Mat& vs, const Mat& T, long Mi, bool drop_resonant) {
  int k = static_cast<int>(vs.rows());
  int d = static_cast<int>(vs.cols());
  return frequency_ball_sum(k, Mi, [&](const std::vector<long>& prefix, long j0, long j1) {
    const auto& ops = kernels::active_ops();
    std::size_t n = static_cast<std::size_t>(j1 - j0 + 1);
    thread_local std::vector<double> w;
    w.assign(n, 1.0);
    for (int i = 0; i < k; ++i) {
      Vec ti = T.col(i);
      ops.mul_rweight(w.data(), affine_base(ti, prefix, j0), ti[k - 1], HUGE_VAL, n);
    }
    for (int i = 0; i < d; ++i) {
      Vec vi = vs.col(i);
      double base = affine_base(vi, prefix, j0);
      if (drop_resonant) {
        double m;
        std::size_t a;
        ops.min_abs(base, vi[k - 1], n, &m, &a);
        if (m < kResTol) {
          for (std::size_t j = 0; j < n; ++j) {
            double dot = base + static_cast<double>(j) * vi[k - 1];
            w[j] = std::abs(dot) < kResTol ? 0.0 : w[j] / std::abs(dot);
          }
          continue;
        }
      }
      ops.mul_recip_abs(w.data(), base, vi[k - 1], n);
    }
    return kernels::sum_pairwise(w.data(), n);
  });
}

void validate_sum_args(const Mat& vs, const Basis& T) {
  if (vs.rows() != T.t.rows())
    throw std::invalid_argument("strongly_dioph_sum: basis/vector dimension mismatch");
  if (vs.cols() < 1) throw std::invalid_argument("strongly_dioph_sum: need at least one vector");
}

}  // namespace

double strongly_dioph_sum(const Mat& vs, const Basis& T, double M, bool allow_large) {
  validate_sum_args(vs, T);
  check_desk_scale(static_cast<int>(vs.rows()), M, allow_large);
  long Mi = static_cast<long>(std::floor(M));
  if (Mi < 1) throw std::invalid_argument("strongly_dioph_sum: M >= 1 required");
  auto witnesses = resonance_prescan(vs, Mi);
  if (!witnesses.empty()) throw ResonanceError(std::move(witnesses));
  return sum_body(vs, T.t, Mi, false);
}

ExcludedSum strongly_dioph_sum_excluding(const Mat& vs, const Basis& T, double M,
                                         bool allow_large) {
  validate_sum_args(vs, T);
  check_desk_scale(static_cast<int>(vs.rows()), M, allow_large);
  long Mi = static_cast<long>(std::floor(M));
  if (Mi < 1) throw std::invalid_argument("strongly_dioph_sum: M >= 1 required");
  ExcludedSum out;
  out.excluded = resonance_prescan(vs, Mi);
  out.sum = sum_body(vs, T.t, Mi, !out.excluded.empty());
  return out;
}

GrowthFit growth_fit(const std::vector<std::pair<double, double>>& sums, int k, int d,
                     double delta) {
  if (sums.size() < 4) throw std::invalid_argument("growth_fit: need at least 4 rows");
  for (std::size_t i = 1; i < sums.size(); ++i)
    if (sums[i].first <= sums[i - 1].first)
      throw std::invalid_argument("growth_fit: M values must increase");
  GrowthFit out;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 1; i < sums.size(); ++i)  // smallest M is transient
    pts.emplace_back(std::log(sums[i].first), std::log(sums[i].second));
  out.eps_est = fit_line(pts).slope;
  double p = static_cast<double>(k) + 2.0 * d + delta;
  for (const auto& [M, s] : sums) out.log_trend.push_back(s / std::pow(std::log(M), p));
  out.trend_non_increasing = true;
  for (std::size_t i = 2; i < out.log_trend.size(); ++i)
    if (out.log_trend[i] > out.log_trend[i - 1]) out.trend_non_increasing = false;
  return out;
}

std::optional<IVec> irrationality_witness(const Mat& V_basis, double M) {
  if (M < 1.0) throw std::invalid_argument("irrationality_witness: M >= 1 required");
  int k = static_cast<int>(V_basis.rows());
  int d = static_cast<int>(V_basis.cols());
  long Mi = static_cast<long>(std::floor(M));
  std::optional<IVec> found;
  half_space_rows(k, Mi, [&](const std::vector<long>& prefix, long j0, long j1) {
    if (found) return;
    for (long j = j0; j <= j1; ++j) {
      bool all_small = true;
      for (int i = 0; i < d && all_small; ++i) {
        Vec vi = V_basis.col(i);
        double dot = affine_base(vi, prefix, j0) + static_cast<double>(j - j0) * vi[k - 1];
        if (std::abs(dot) >= 1e-9) all_small = false;
      }
      if (all_small) {
        IVec w(k);
        for (int c = 0; c < k - 1; ++c)
          w[c] = static_cast<int>(prefix[static_cast<std::size_t>(c)]);
        w[k - 1] = static_cast<int>(j);
        found = w;
        return;
      }
    }
  });
  return found;
}

}  // namespace apernet
