#include "apernet/correlation.hpp"

#include "apernet/rng.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace apernet {

namespace {

using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Diagonalize D = S^{-1} Q T by elementary operations, keeping Q = S * D * T.
// Only S is tracked; the saturation of the column span of Q is spanned by the
// first rank columns of S.
IMat saturate_columns(IMat D) {
  int k = static_cast<int>(D.rows());
  int d = static_cast<int>(D.cols());
  IMat S = IMat::Identity(k, k);

  auto row_swap = [&](int i, int j) {
    D.row(i).swap(D.row(j));
    S.col(i).swap(S.col(j));
  };
  auto row_sub = [&](int i, int j, long long q) {  // row_i -= q row_j
    D.row(i) -= q * D.row(j);
    S.col(j) += q * S.col(i);
  };
  auto col_swap = [&](int i, int j) { D.col(i).swap(D.col(j)); };
  auto col_sub = [&](int i, int j, long long q) { D.col(i) -= q * D.col(j); };

  int t = 0;
  for (; t < d; ++t) {
    // pivot: nonzero entry of smallest magnitude in the remaining block
    int pi = -1, pj = -1;
    long long best = 0;
    for (int i = t; i < k; ++i)
      for (int j = t; j < d; ++j)
        if (D(i, j) != 0 && (pi < 0 || std::abs(D(i, j)) < best)) {
          best = std::abs(D(i, j));
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    if (pi != t) row_swap(pi, t);
    if (pj != t) col_swap(pj, t);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < k; ++i)
        if (D(i, t) != 0) {
          long long q = D(i, t) / D(t, t);
          row_sub(i, t, q);
          if (D(i, t) != 0) {
            row_swap(i, t);
            clean = false;
          }
        }
      for (int j = t + 1; j < d; ++j)
        if (D(t, j) != 0) {
          long long q = D(t, j) / D(t, t);
          col_sub(j, t, q);
          if (D(t, j) != 0) {
            col_swap(j, t);
            clean = false;
          }
        }
    }
  }
  if (t < d) throw std::invalid_argument("rational subspace: basis does not have full rank");
  return S.leftCols(d);
}

}  // namespace

RationalSubspace make_rational_subspace(const Eigen::MatrixXi& B) {
  if (B.cols() < 1 || B.rows() <= B.cols())
    throw std::invalid_argument("rational subspace: need 1 <= d < k");
  if (B.cwiseAbs().maxCoeff() > 1000)
    throw std::invalid_argument("rational subspace: integer entries capped at 1000");
  IMat D = B.cast<long long>();
  IMat sat = saturate_columns(D);
  RationalSubspace out;
  out.basis = sat.cast<int>();
  return out;
}

double RationalSubspace::domain_volume() const {
  Mat Q = basis.cast<double>();
  return std::sqrt((Q.transpose() * Q).determinant());
}

OrbitCount orbit_section_count(const RationalSubspace& Q, const Vec& x, const Section& S) {
  int k = Q.k(), d = Q.d();
  if (S.k() != k || S.codim() != k - d)
    throw std::invalid_argument("orbit_section_count: section does not match Q");
  OrbitCount out;
  if (S.boxes.empty()) return out;

  Mat Bsys(k, k);
  Bsys.leftCols(d) = Q.basis.cast<double>();
  Bsys.rightCols(k - d) = -S.W;
  if (std::abs(Bsys.determinant()) <= kDefaultTol)
    throw std::invalid_argument("orbit_section_count: section not transverse to Q");
  Mat Bi = Bsys.inverse();
  Vec t = Bi * (S.anchor - x);

  Vec ulo(k), uhi(k);
  Box bb = S.bounding();
  for (int i = 0; i < d; ++i) {
    ulo[i] = 0.0;
    uhi[i] = 1.0;
  }
  ulo.tail(k - d) = bb.lo;
  uhi.tail(k - d) = bb.hi;

  for (const auto& n : detail::lattice_points_in_box(Bi, t, Box(ulo, uhi))) {
    Vec u = Bi * n.cast<double>() + t;
    bool in_domain = true;
    for (int i = 0; i < d; ++i)
      if (u[i] < 0.0 || u[i] >= 1.0) in_domain = false;
    if (!in_domain) continue;
    Vec c = u.tail(k - d);
    bool open = S.contains(c, ContainMode::Open);
    bool closed = S.contains(c, ContainMode::Closed);
    if (open) ++out.open_count;
    if (closed) ++out.closed_count;
    if (closed && S.boundary_distance(c) < kDefaultTol) out.boundary_hit = true;
  }
  return out;
}

std::optional<CorrelationWitness> not_correlated_test(const RationalSubspace& Q, const Section& S,
                                                      int sample_count, std::uint64_t seed) {
  Rng rng(seed);
  int k = Q.k();
  std::map<long, Vec> seen;
  for (int s = 0; s < sample_count; ++s) {
    Vec x(k);
    for (int i = 0; i < k; ++i) x[i] = rng.uniform();
    OrbitCount c = orbit_section_count(Q, x, S);
    if (c.boundary_hit || c.open_count != c.closed_count) continue;
    auto [it, fresh] = seen.emplace(c.open_count, x);
    if (!fresh) continue;
    if (seen.size() >= 2) {
      auto first = seen.begin();
      auto second = std::next(first);
      return CorrelationWitness{first->second, second->second, first->first, second->first};
    }
  }
  return std::nullopt;
}

double dilated_domain_discrepancy(const RationalSubspace& Q, const Section& S, const Vec& x,
                                  double lambda, long N) {
  if (N < 1) throw std::invalid_argument("dilated_domain_discrepancy: N >= 1 required");
  OrbitCount c = orbit_section_count(Q, x, S);
  if (c.boundary_hit)
    throw std::runtime_error("dilated_domain_discrepancy: orbit hits the section boundary");

  int d = Q.d();
  double Nd = std::pow(static_cast<double>(N), d);
  double domain_vol = Q.domain_volume();
  double count_M = Nd * static_cast<double>(c.open_count);  // periodicity over the tiles
  double vol_M = Nd * domain_vol;

  // facet areas of the dilated parallelotope, inflated to thickness-2 slabs
  Mat B = Q.basis.cast<double>() * static_cast<double>(N);
  double boundary = 0.0;
  for (int j = 0; j < d; ++j) {
    double facet;
    if (d == 1) {
      facet = 1.0;  // endpoints
    } else {
      Mat F(B.rows(), d - 1);
      int col = 0;
      for (int i = 0; i < d; ++i)
        if (i != j) F.col(col++) = B.col(i);
      facet = std::sqrt((F.transpose() * F).determinant());
    }
    boundary += 2.0 * (2.0 * facet);  // two opposite facets, thickness 2
  }
  return std::abs(count_M - lambda * vol_M) / boundary;
}

}  // namespace apernet
