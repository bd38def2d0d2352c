#include "apernet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace apernet {

namespace {

bool lex_less_vec(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// Column-wise LLL (delta = 0.99) on a double basis, tracking the unimodular
// transform in exact integers.
void lll_reduce(Mat& B, Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& U) {
  const double delta = 0.99;
  int n = static_cast<int>(B.cols());
  U = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  Mat Bs = B;  // Gram-Schmidt vectors
  Mat mu = Mat::Identity(n, n);
  auto gram_schmidt = [&]() {
    for (int i = 0; i < n; ++i) {
      Bs.col(i) = B.col(i);
      for (int j = 0; j < i; ++j) {
        mu(i, j) = B.col(i).dot(Bs.col(j)) / Bs.col(j).squaredNorm();
        Bs.col(i) -= mu(i, j) * Bs.col(j);
      }
    }
  };
  gram_schmidt();
  int k = 1;
  int guard = 0;
  while (k < n && ++guard < 100000) {
    for (int j = k - 1; j >= 0; --j) {
      double q = std::round(mu(k, j));
      if (q != 0.0) {
        B.col(k) -= q * B.col(j);
        U.col(k) -= static_cast<long long>(q) * U.col(j);
        gram_schmidt();
      }
    }
    if (Bs.col(k).squaredNorm() >=
        (delta - mu(k, k - 1) * mu(k, k - 1)) * Bs.col(k - 1).squaredNorm()) {
      ++k;
    } else {
      B.col(k).swap(B.col(k - 1));
      U.col(k).swap(U.col(k - 1));
      gram_schmidt();
      k = std::max(k - 1, 1);
    }
  }
}

}  // namespace

namespace detail {

// All n in Z^k with Bi*n + t inside ubox (plus a small slack; callers apply
// their exact membership rules afterward). The box is scaled to a unit cube,
// the lattice basis LLL-reduced, and integer points recovered by
// Fincke-Pohst enumeration inside the bounding ball of radius sqrt(k).
std::vector<Eigen::VectorXi> lattice_points_in_box(const Mat& Bi, const Vec& t, const Box& ubox) {
  int k = static_cast<int>(Bi.rows());
  double expect = ubox.volume() / std::abs(Bi.determinant());
  if (expect > 5e7)
    throw std::runtime_error("lattice enumeration: requested region holds > 5e7 candidates");

  Vec ctr = ubox.center();
  Vec half = 0.5 * (ubox.hi - ubox.lo);
  Mat D = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) D(i, i) = 1.0 / half[i];

  Mat Gr = D * Bi;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> U;
  lll_reduce(Gr, U);

  Eigen::HouseholderQR<Mat> qr(Gr);
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  Mat Q = qr.householderQ();
  Vec y = Q.transpose() * (D * (t - ctr));

  double rad = std::sqrt(static_cast<double>(k)) * (1.0 + 1e-9) + 1e-9;
  double rad2 = rad * rad;

  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXd z(k);
  std::function<void(int, double)> rec = [&](int lvl, double remaining2) {
    double diag = R(lvl, lvl);
    double partial = y[lvl];
    for (int j = lvl + 1; j < k; ++j) partial += R(lvl, j) * z[j];
    double c = -partial / diag;
    double h = std::sqrt(std::max(0.0, remaining2)) / std::abs(diag);
    long zlo = static_cast<long>(std::ceil(c - h - 1e-12));
    long zhi = static_cast<long>(std::floor(c + h + 1e-12));
    for (long v = zlo; v <= zhi; ++v) {
      z[lvl] = static_cast<double>(v);
      double r = diag * z[lvl] + partial;
      double rem = remaining2 - r * r;
      if (rem < -1e-9) continue;
      if (lvl == 0) {
        Eigen::VectorXi n(k);
        for (int i = 0; i < k; ++i) {
          double acc = 0.0;
          for (int j = 0; j < k; ++j) acc += static_cast<double>(U(i, j)) * z[j];
          n[i] = static_cast<int>(std::llround(acc));
        }
        out.push_back(n);
      } else {
        rec(lvl - 1, rem);
      }
    }
  };
  rec(k - 1, rad2);
  return out;
}

}  // namespace detail

FlowSpec::FlowSpec(Mat acting, Vec base) : A(std::move(acting)), x(std::move(base)) {
  if (A.rows() < 2 || A.cols() < 1 || A.cols() >= A.rows())
    throw std::invalid_argument("FlowSpec: need 1 <= d < k");
  if (x.size() != A.rows()) throw std::invalid_argument("FlowSpec: base point dimension mismatch");
  Eigen::FullPivLU<Mat> lu(A);
  if (lu.rank() < A.cols())
    throw std::invalid_argument("FlowSpec: acting vectors must be independent");
}

Section::Section(Mat plane, Vec anchor_point, std::vector<Box> shape)
    : W(std::move(plane)), anchor(std::move(anchor_point)), boxes(std::move(shape)) {
  if (W.cols() < 1 || W.cols() >= W.rows())
    throw std::invalid_argument("Section: bad plane dimension");
  if (anchor.size() != W.rows()) throw std::invalid_argument("Section: anchor dimension mismatch");
  Eigen::FullPivLU<Mat> lu(W);
  if (lu.rank() < W.cols()) throw std::invalid_argument("Section: plane basis must be independent");
  for (const auto& b : boxes)
    if (b.dim() != codim()) throw std::invalid_argument("Section: shape dimension mismatch");
}

bool Section::contains(const Vec& c, ContainMode mode) const {
  for (const auto& b : boxes) {
    switch (mode) {
      case ContainMode::Open:
        if (b.contains_open(c)) return true;
        break;
      case ContainMode::HalfOpen:
        if (b.contains_half_open(c)) return true;
        break;
      case ContainMode::Closed:
        if (b.contains_closed(c)) return true;
        break;
    }
  }
  return false;
}

double Section::boundary_distance(const Vec& c) const {
  double d = HUGE_VAL;
  for (const auto& b : boxes) d = std::min(d, b.boundary_distance(c));
  return d;
}

Box Section::bounding() const {
  if (boxes.empty()) throw std::logic_error("Section: no shape");
  Vec lo = boxes[0].lo, hi = boxes[0].hi;
  for (const auto& b : boxes) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  return Box(lo, hi);
}

double Section::measure() const {
  double m = 0.0;
  for (const auto& b : boxes) m += b.volume();
  return m;
}

namespace {

// pi injective on the closure: pairwise vertex differences of the embedded
// shape must stay away from Z^k
void check_section_injective(const Section& s) {
  std::vector<Vec> verts;
  int c = s.codim();
  for (const auto& b : s.boxes) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c); ++mask) {
      Vec corner(c);
      for (int i = 0; i < c; ++i) corner[i] = (mask >> i) & 1 ? b.hi[i] : b.lo[i];
      verts.push_back(s.anchor + s.W * corner);
    }
  }
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j) {
      Vec diff = verts[i] - verts[j];
      if (diff.cwiseAbs().maxCoeff() <= kDefaultTol) continue;
      bool off = false;
      for (Eigen::Index q = 0; q < diff.size(); ++q)
        if (std::abs(diff[q] - std::round(diff[q])) > kDefaultTol) {
          off = true;
          break;
        }
      if (!off) throw std::invalid_argument("section: pi is not injective on the closure");
    }
}

Box product_box(const Box& a, const Box& b) {
  Vec lo(a.dim() + b.dim()), hi(a.dim() + b.dim());
  lo << a.lo, b.lo;
  hi << a.hi, b.hi;
  return Box(lo, hi);
}

void sort_and_flag(PointSet& ps, const std::vector<double>* bdist) {
  std::vector<std::size_t> order(ps.pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less_vec(ps.pts[a], ps.pts[b]); });
  std::vector<Vec> sorted;
  sorted.reserve(ps.pts.size());
  std::vector<std::size_t> flags;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    sorted.push_back(ps.pts[order[rank]]);
    if (bdist && (*bdist)[order[rank]] < kDefaultTol) flags.push_back(rank);
  }
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if ((sorted[i] - sorted[i - 1]).cwiseAbs().maxCoeff() < kDefaultTol)
      throw std::runtime_error("point set: duplicate points within tolerance");
  ps.pts = std::move(sorted);
  ps.boundary_flags = std::move(flags);
}

}  // namespace

PointSet visit_set(const FlowSpec& flow, const Section& section, const Box& window) {
  int k = flow.k(), d = flow.d();
  if (section.k() != k || section.codim() != k - d)
    throw std::invalid_argument("visit_set: section does not match flow dimensions");
  if (window.dim() != d) throw std::invalid_argument("visit_set: window must be d-dimensional");

  PointSet ps;
  ps.dim = d;
  ps.window = window;
  ps.generator = "visit_set";
  if (section.boxes.empty()) return ps;

  check_section_injective(section);

  Mat Bsys(k, k);
  Bsys.leftCols(d) = flow.A;
  Bsys.rightCols(k - d) = -section.W;
  if (std::abs(Bsys.determinant()) <= kDefaultTol)
    throw std::invalid_argument("visit_set: section is not transverse to the flow");

  Mat Bi = Bsys.inverse();
  Vec t = Bi * (section.anchor - flow.x);
  Box ubox = product_box(window, section.bounding());

  std::vector<double> bdist;
  for (const auto& n : detail::lattice_points_in_box(Bi, t, ubox)) {
    Vec u = Bi * n.cast<double>() + t;
    Vec a = u.head(d);
    Vec c = u.tail(k - d);
    if (!window.contains_closed(a)) continue;
    if (!section.contains(c)) continue;
    ps.pts.push_back(a);
    bdist.push_back(section.boundary_distance(c));
  }
  sort_and_flag(ps, &bdist);
  return ps;
}

double visit_density(const FlowSpec& flow, const Section& section) {
  int k = flow.k(), d = flow.d();
  Mat Bsys(k, k);
  Bsys.leftCols(d) = flow.A;
  Bsys.rightCols(k - d) = -section.W;
  return section.measure() / std::abs(Bsys.determinant());
}

PointSet cut_and_project(const Mat& lattice_basis, const Mat& Vb, const Mat& Wb,
                         const std::vector<Box>& K, const Box& phys_window) {
  int k = static_cast<int>(lattice_basis.rows());
  int d = static_cast<int>(Vb.cols());
  if (Wb.cols() != k - d || Vb.rows() != k || Wb.rows() != k)
    throw std::invalid_argument("cut_and_project: dimension mismatch");
  Mat split(k, k);
  split.leftCols(d) = Vb;
  split.rightCols(k - d) = Wb;
  if (std::abs(split.determinant()) <= kDefaultTol)
    throw std::invalid_argument("cut_and_project: V and W do not span R^k");
  if (std::abs(lattice_basis.determinant()) <= kDefaultTol)
    throw std::invalid_argument("cut_and_project: degenerate lattice");
  if (phys_window.dim() != d) throw std::invalid_argument("cut_and_project: window dimensions");

  PointSet ps;
  ps.dim = d;
  ps.window = phys_window;
  ps.generator = "cut_and_project";
  if (K.empty()) return ps;

  Vec klo = K[0].lo, khi = K[0].hi;
  for (const auto& box : K) {
    if (box.dim() != k - d) throw std::invalid_argument("cut_and_project: K dimension mismatch");
    klo = klo.cwiseMin(box.lo);
    khi = khi.cwiseMax(box.hi);
  }

  // (a, c) coordinates of a lattice point y = L n in the V + W splitting
  Mat Bi = split.inverse() * lattice_basis;
  Vec t = Vec::Zero(k);
  Box ubox = product_box(phys_window, Box(klo, khi));
  for (const auto& n : detail::lattice_points_in_box(Bi, t, ubox)) {
    Vec u = Bi * n.cast<double>();
    Vec a = u.head(d);
    Vec c = u.tail(k - d);
    if (!phys_window.contains_closed(a)) continue;
    bool in_window = false;
    for (const auto& box : K)
      if (box.contains_half_open(c)) {
        in_window = true;
        break;
      }
    if (!in_window) continue;
    ps.pts.push_back(a);
  }
  sort_and_flag(ps, nullptr);
  return ps;
}

namespace {

struct BucketGrid {
  double cell;
  int d;
  std::map<std::vector<long>, std::vector<std::size_t>> cells;

  BucketGrid(const std::vector<Vec>& pts, int dim, double c) : cell(c), d(dim) {
    for (std::size_t i = 0; i < pts.size(); ++i) cells[key(pts[i])].push_back(i);
  }
  std::vector<long> key(const Vec& p) const {
    std::vector<long> k(d);
    for (int i = 0; i < d; ++i) k[i] = static_cast<long>(std::floor(p[i] / cell));
    return k;
  }
  template <class Fn>
  void ring(const Vec& p, long radius, Fn&& fn) const {
    auto k0 = key(p);
    std::vector<long> nb(d);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == d) {
        auto it = cells.find(nb);
        if (it != cells.end())
          for (std::size_t j : it->second) fn(j);
        return;
      }
      for (long o = -radius; o <= radius; ++o) {
        nb[pos] = k0[pos] + o;
        rec(pos + 1);
      }
    };
    rec(0);
  }
};

}  // namespace

std::pair<double, double> separation_covering(const PointSet& ps, double probe_spacing,
                                              double erode_margin) {
  if (ps.pts.size() < 2)
    throw std::invalid_argument("separation_covering: need at least 2 points");
  int d = ps.dim;

  double cell =
      std::max(std::pow(ps.window.volume() / static_cast<double>(ps.pts.size()), 1.0 / d), 1e-12);
  double r2 = HUGE_VAL;
  for (int attempt = 0; attempt < 60 && !std::isfinite(r2); ++attempt) {
    BucketGrid grid(ps.pts, d, cell);
    for (std::size_t i = 0; i < ps.pts.size(); ++i) {
      grid.ring(ps.pts[i], 1, [&](std::size_t j) {
        if (j > i) r2 = std::min(r2, (ps.pts[i] - ps.pts[j]).squaredNorm());
      });
    }
    cell *= 2.0;
  }
  double r_est = std::sqrt(r2);

  if (probe_spacing <= 0.0) probe_spacing = r_est / 4.0;
  if (erode_margin < 0.0) erode_margin = 3.0 * r_est;

  Vec lo = ps.window.lo, hi = ps.window.hi;
  for (int i = 0; i < d; ++i) {
    lo[i] += erode_margin;
    hi[i] -= erode_margin;
    if (lo[i] >= hi[i])
      throw std::invalid_argument("separation_covering: window too small to erode");
  }

  BucketGrid grid(ps.pts, d, r_est);
  double R_est = 0.0;
  std::vector<long> counts(d);
  for (int i = 0; i < d; ++i)
    counts[i] = static_cast<long>(std::floor((hi[i] - lo[i]) / probe_spacing)) + 1;
  std::vector<long> idx(d, 0);
  bool done = false;
  while (!done) {
    Vec probe(d);
    for (int i = 0; i < d; ++i) probe[i] = lo[i] + idx[i] * probe_spacing;
    double best2 = HUGE_VAL;
    for (long ring = 1; ring < 64 && !std::isfinite(best2); ++ring)
      grid.ring(probe, ring, [&](std::size_t j) {
        best2 = std::min(best2, (probe - ps.pts[j]).squaredNorm());
      });
    R_est = std::max(R_est, std::sqrt(best2));
    int pos = 0;
    while (pos < d) {
      if (++idx[pos] < counts[pos]) break;
      idx[pos] = 0;
      ++pos;
    }
    done = pos == d;
  }
  return {r_est, R_est};
}

InterlaceResult interlace_union(const std::vector<PointSet>& nets,
                                const std::vector<LatticeMatching>& matchings,
                                const Mat& lattice_basis) {
  if (nets.empty() || nets.size() != matchings.size())
    throw std::invalid_argument("interlace_union: nets/matchings mismatch");
  std::size_t r = nets.size();
  int d = nets[0].dim;
  if (lattice_basis.rows() != d || lattice_basis.cols() != d)
    throw std::invalid_argument("interlace_union: lattice basis dimension");

  // every matching must be a bijection onto the same lattice window
  std::vector<std::vector<std::vector<int>>> images;
  for (std::size_t i = 0; i < r; ++i) {
    if (matchings[i].targets.size() != nets[i].pts.size())
      throw std::invalid_argument("interlace_union: matching size mismatch");
    std::vector<std::vector<int>> tgts;
    for (const auto& z : matchings[i].targets)
      tgts.emplace_back(z.data(), z.data() + z.size());
    std::sort(tgts.begin(), tgts.end());
    if (std::adjacent_find(tgts.begin(), tgts.end()) != tgts.end())
      throw std::invalid_argument("interlace_union: matching is not injective");
    images.push_back(std::move(tgts));
    if (images[i] != images[0])
      throw std::invalid_argument("interlace_union: matchings target different lattice windows");
  }

  {
    std::vector<Vec> all;
    for (const auto& n : nets) all.insert(all.end(), n.pts.begin(), n.pts.end());
    std::sort(all.begin(), all.end(), lex_less_vec);
    for (std::size_t i = 1; i < all.size(); ++i)
      if ((all[i] - all[i - 1]).cwiseAbs().maxCoeff() < kDefaultTol)
        throw std::invalid_argument("interlace_union: nets overlap");
  }

  InterlaceResult out;
  out.refined_basis = lattice_basis;
  out.refined_basis.col(0) /= static_cast<double>(r);
  for (std::size_t i = 0; i < r; ++i)
    out.coset_reps.push_back(lattice_basis.col(0) *
                             (static_cast<double>(i) / static_cast<double>(r)));

  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t p = 0; p < nets[i].pts.size(); ++p) {
      Vec target = lattice_basis * matchings[i].targets[p].cast<double>() + out.coset_reps[i];
      out.points.push_back(nets[i].pts[p]);
      out.targets.push_back(target);
      out.max_displacement = std::max(out.max_displacement, (target - nets[i].pts[p]).norm());
    }
  }
  return out;
}

}  // namespace apernet
