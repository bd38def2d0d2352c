#include "apernet/equidist.hpp"

#include "apernet/freqsweep.hpp"
#include "apernet/kernels.hpp"
#include "apernet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace apernet {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// membership on the torus, hoisted for sample loops
struct TargetMembership {
  const Box* box = nullptr;
  const Parallelotope* par = nullptr;
  Mat Linv;
  Vec blo, bhi;  // vertex bounding box of the parallelotope

  explicit TargetMembership(const TorusTarget& t) {
    if (std::holds_alternative<Box>(t)) {
      box = &std::get<Box>(t);
      for (Eigen::Index i = 0; i < box->lo.size(); ++i)
        if (box->hi[i] - box->lo[i] > 1.0 + 1e-12)
          throw std::invalid_argument("torus box target: side exceeds 1");
    } else {
      par = &std::get<Parallelotope>(t);
      check_torus_injective(*par);
      Linv = par->L.inverse();
      auto verts = par->vertices();
      blo = verts[0];
      bhi = verts[0];
      for (const auto& v : verts) {
        blo = blo.cwiseMin(v);
        bhi = bhi.cwiseMax(v);
      }
    }
  }

  bool contains(const Vec& y) const {
    if (box) {
      for (Eigen::Index i = 0; i < box->lo.size(); ++i) {
        double len = box->hi[i] - box->lo[i];
        if (len >= 1.0 - 1e-12) continue;  // full axis
        if (frac01(y[i] - box->lo[i]) > len) return false;
      }
      return true;
    }
    int k = par->k();
    std::vector<long> lo(k), hi(k);
    for (int i = 0; i < k; ++i) {
      lo[i] = static_cast<long>(std::floor(blo[i] - y[i])) - 1;
      hi[i] = static_cast<long>(std::ceil(bhi[i] - y[i])) + 1;
    }
    std::vector<long> n(k, 0);
    std::function<bool(int)> rec = [&](int pos) -> bool {
      if (pos == k) {
        Vec z(k);
        for (int i = 0; i < k; ++i) z[i] = y[i] + static_cast<double>(n[i]) - par->offset[i];
        Vec c = Linv * z;
        for (int i = 0; i < k; ++i)
          if (std::abs(c[i]) > par->b[i]) return false;
        return true;
      }
      for (long v = lo[pos]; v <= hi[pos]; ++v) {
        n[pos] = v;
        if (rec(pos + 1)) return true;
      }
      return false;
    };
    return rec(0);
  }
};

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13};

double exp_integral_factor(double omega, double T) {
  if (std::abs(omega) < kResonanceTol) return 2.0 * T;
  return std::sin(kTwoPi * omega * T) / (kPi * omega);
}

}  // namespace

double target_volume(const TorusTarget& t) {
  if (std::holds_alternative<Box>(t)) return std::get<Box>(t).volume();
  return std::get<Parallelotope>(t).volume();
}

double birkhoff_exact_1d(const BirkhoffQuery& q) {
  if (q.flow.d() != 1) throw std::invalid_argument("birkhoff_exact_1d: d must be 1");
  if (!std::holds_alternative<Box>(q.target))
    throw std::invalid_argument("birkhoff_exact_1d: aligned-box target required");
  const Box& U = std::get<Box>(q.target);
  const double T = q.T;
  Vec v = q.flow.A.col(0);
  const Vec& x = q.flow.x;
  int k = q.flow.k();

  std::vector<double> cuts{-T, T};
  for (int j = 0; j < k; ++j) {
    double len = U.hi[j] - U.lo[j];
    if (len >= 1.0 - 1e-12) continue;  // unconstrained axis
    if (std::abs(v[j]) < 1e-15) {
      // all-or-nothing constraint
      if (frac01(x[j] - U.lo[j]) > len) return 0.0;
      continue;
    }
    for (double edge : {U.lo[j], U.hi[j]}) {
      long n0 = static_cast<long>(std::floor(std::min(edge - x[j] - T * v[j],
                                                      edge - x[j] + T * v[j]))) -
                1;
      long n1 = static_cast<long>(std::ceil(std::max(edge - x[j] - T * v[j],
                                                     edge - x[j] + T * v[j]))) +
                1;
      for (long n = n0; n <= n1; ++n) {
        double t = (edge - x[j] + static_cast<double>(n)) / v[j];
        if (t >= -T && t <= T) cuts.push_back(t);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  TargetMembership mem(q.target);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    double mid = 0.5 * (a + b);
    if (mem.contains(x + v * mid)) total += b - a;
  }
  return total;
}

Estimate birkhoff_estimate(const BirkhoffQuery& q, std::uint64_t seed, int points_per_rep,
                           int replicates) {
  int d = q.flow.d();
  if (d > 6) throw std::invalid_argument("birkhoff_estimate: d too large");
  TargetMembership mem(q.target);
  Rng rng(seed);
  double volBT = std::pow(2.0 * q.T, d);
  std::vector<double> reps(replicates);
  for (int r = 0; r < replicates; ++r) {
    Vec shift(d);
    for (int i = 0; i < d; ++i) shift[i] = rng.uniform();
    long hits = 0;
    for (int s = 0; s < points_per_rep; ++s) {
      Vec a(d);
      for (int i = 0; i < d; ++i) {
        double u = halton(static_cast<std::uint64_t>(s) + 1, kPrimes[i]) + shift[i];
        u -= std::floor(u);
        a[i] = -q.T + 2.0 * q.T * u;
      }
      if (mem.contains(q.flow.x + q.flow.A * a)) ++hits;
    }
    reps[r] = volBT * static_cast<double>(hits) / static_cast<double>(points_per_rep);
  }
  double mean = 0.0;
  for (double v : reps) mean += v;
  mean /= replicates;
  double var = 0.0;
  for (double v : reps) var += (v - mean) * (v - mean);
  double stderr_mean =
      replicates > 1
          ? std::sqrt(var / (static_cast<double>(replicates) * (static_cast<double>(replicates) - 1.0)))
          : 0.0;
  return {mean, 4.0 * stderr_mean + 1e-9 * volBT};
}

std::complex<double> exp_integral(const IVec& m, const FlowSpec& flow, double T) {
  double prod = 1.0;
  Vec md = m.cast<double>();
  for (int i = 0; i < flow.d(); ++i) prod *= exp_integral_factor(flow.A.col(i).dot(md), T);
  return {prod, 0.0};
}

namespace {

// shared inner row of both bound sums: r-weight factors, then the
// exponential-integral moduli along the flow directions
struct BoundSum {
  const FlowSpec& flow;
  double T;
  const Mat* L = nullptr;  // columns t_i; null means standard-basis weights
  double clip = HUGE_VAL;

  double operator()(const std::vector<long>& prefix, long j0, long j1) const {
    const auto& ops = kernels::active_ops();
    std::size_t n = static_cast<std::size_t>(j1 - j0 + 1);
    thread_local std::vector<double> w;
    w.assign(n, 1.0);
    int k = flow.k();

    if (L == nullptr) {
      double pref = 1.0;
      for (long p : prefix) {
        double a = std::abs(static_cast<double>(p));
        if (a > 1.0) pref /= a;
      }
      if (pref != 1.0)
        for (auto& v : w) v = pref;
      ops.mul_rweight(w.data(), static_cast<double>(j0), 1.0, clip, n);
    } else {
      for (int i = 0; i < k; ++i) {
        double step = (*L)(k - 1, i);
        double base = static_cast<double>(j0) * step;
        for (std::size_t c = 0; c < prefix.size(); ++c)
          base += static_cast<double>(prefix[c]) * (*L)(static_cast<Eigen::Index>(c), i);
        ops.mul_rweight(w.data(), base, step, clip, n);
      }
    }

    for (int i = 0; i < flow.d(); ++i) {
      double step = flow.A(flow.k() - 1, i);
      double base = static_cast<double>(j0) * step;
      for (std::size_t c = 0; c < prefix.size(); ++c)
        base += static_cast<double>(prefix[c]) * flow.A(static_cast<Eigen::Index>(c), i);
      for (std::size_t j = 0; j < n; ++j) {
        double omega = base + static_cast<double>(j) * step;
        w[j] *= std::abs(exp_integral_factor(omega, T));
      }
    }
    return kernels::sum_pairwise(w.data(), n);
  }
};

}  // namespace

EtBound erdos_turan_bound(const Box& target, const FlowSpec& flow, double T, double M) {
  if (M < 1.0) throw std::invalid_argument("erdos_turan_bound: M >= 1 required");
  if (target.dim() != flow.k())
    throw std::invalid_argument("erdos_turan_bound: target dimension mismatch");
  TargetMembership validate{TorusTarget(target)};  // rejects sides above 1
  (void)validate;
  int d = flow.d();
  double Mf = std::floor(M);
  double leading = std::pow(2.0 * T, d) / Mf;
  BoundSum body{flow, T, nullptr, HUGE_VAL};
  double sum = frequency_ball_sum(flow.k(), static_cast<long>(Mf), std::cref(body));
  return {leading, sum};
}

EtBound nt_estimate_bound(const Parallelotope& target, const FlowSpec& flow, double T, double M) {
  if (M < 1.0) throw std::invalid_argument("nt_estimate_bound: M >= 1 required");
  if (target.k() != flow.k()) throw std::invalid_argument("nt_estimate_bound: dimension mismatch");
  check_torus_injective(target);
  int k = flow.k(), d = flow.d();
  double front = std::pow(1.0 + 2.0 * target.bmax(), k) * target.abs_det();
  double Mf = std::floor(M);
  double leading = front * std::pow(2.0 * T, d) / Mf;

  double lambda = sup_operator_norm(target.L.transpose().inverse());
  long Mi = std::max(1L, static_cast<long>(std::floor(lambda * Mf)));
  BoundSum body{flow, T, &target.L, Mf};
  double sum = frequency_ball_sum(k, Mi, std::cref(body));
  return {leading, front * sum};
}

double discrete_discrepancy(const PointSet& Y, const Box& E, double lambda) {
  if (E.dim() != Y.dim) throw std::invalid_argument("discrete_discrepancy: dimension mismatch");
  for (int i = 0; i < E.dim(); ++i)
    if (E.lo[i] < Y.window.lo[i] - kDefaultTol || E.hi[i] > Y.window.hi[i] + kDefaultTol)
      throw std::invalid_argument("discrete_discrepancy: E exceeds the generation window");
  long count = 0;
  for (const auto& p : Y.pts)
    if (E.contains_half_open(p)) ++count;
  return std::abs(static_cast<double>(count) - lambda * E.volume());
}

double dy_sup(const PointSet& Y, long rho, double lambda, const Box& window) {
  if (lambda <= 0.0) throw std::invalid_argument("dy_sup: lambda must be positive");
  if (rho < 1) throw std::invalid_argument("dy_sup: rho must be >= 1");
  int d = Y.dim;
  std::vector<long> a_lo(d), a_hi(d);
  for (int i = 0; i < d; ++i) {
    a_lo[i] = static_cast<long>(std::ceil(window.lo[i] / static_cast<double>(rho) - 1e-12));
    a_hi[i] = static_cast<long>(std::floor(window.hi[i] / static_cast<double>(rho) + 1e-12)) - 1;
    if (a_hi[i] < a_lo[i]) throw std::invalid_argument("dy_sup: no grid cube of side rho fits");
  }
  std::map<std::vector<long>, long> counts;
  for (const auto& p : Y.pts) {
    std::vector<long> key(d);
    bool in = true;
    for (int i = 0; i < d; ++i) {
      key[i] = static_cast<long>(std::floor(p[i] / static_cast<double>(rho)));
      if (key[i] < a_lo[i] || key[i] > a_hi[i]) in = false;
    }
    if (in) ++counts[key];
  }
  double cube_vol = std::pow(static_cast<double>(rho), d);
  double worst = 0.0;
  std::vector<long> idx = a_lo;
  bool done = false;
  while (!done) {
    auto it = counts.find(idx);
    double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    worst = std::max(worst, std::abs(c - lambda * cube_vol) / (lambda * cube_vol));
    int pos = 0;
    while (pos < d) {
      if (++idx[pos] <= a_hi[pos]) break;
      idx[pos] = a_lo[pos];
      ++pos;
    }
    done = pos == d;
  }
  return worst;
}

long MRule::apply(double T) const {
  return std::max(1L, static_cast<long>(std::floor(std::pow(T, exponent))));
}

DiscrepancyReport discrepancy_scan(const FlowSpec& flow, const TorusTarget& target,
                                   const std::vector<double>& T_list, const MRule& m_rule,
                                   std::uint64_t seed) {
  for (std::size_t i = 1; i < T_list.size(); ++i)
    if (T_list[i] <= T_list[i - 1])
      throw std::invalid_argument("discrepancy_scan: T_list must be increasing");
  DiscrepancyReport rep;
  rep.seed = seed;
  double vol = target_volume(target);
  int d = flow.d();
  for (std::size_t i = 0; i < T_list.size(); ++i) {
    double T = T_list[i];
    long M = m_rule.apply(T);
    double NT;
    if (d == 1 && std::holds_alternative<Box>(target)) {
      NT = birkhoff_exact_1d({flow, target, T});
    } else {
      NT = birkhoff_estimate({flow, target, T}, seed + i).value;
    }
    EtBound b = std::holds_alternative<Box>(target)
                    ? erdos_turan_bound(std::get<Box>(target), flow, T, static_cast<double>(M))
                    : nt_estimate_bound(std::get<Parallelotope>(target), flow, T,
                                        static_cast<double>(M));
    double volume_term = vol * std::pow(2.0 * T, d);
    rep.rows.push_back({T, NT, volume_term, std::abs(NT - volume_term), b.leading, b.sum_term, M});
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.rows)
    if (r.abs_diff >= 1e-12) pts.emplace_back(std::log(r.T), std::log(r.abs_diff));
  rep.slope = fit_line(pts);
  rep.degenerate = rep.slope.degenerate;
  return rep;
}

}  // namespace apernet
