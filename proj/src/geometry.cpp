#include "apernet/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace apernet {

double frac01(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // e.g. x = -1e-17
  return f;
}

Vec torus_reduce(const Vec& x) {
  if (!x.allFinite()) throw std::domain_error("torus_reduce: non-finite input");
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = frac01(x[i]);
  return out;
}

Box::Box(Vec l, Vec h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo.size() != hi.size()) throw std::invalid_argument("Box: dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("Box: requires lo < hi per axis");
}

double Box::volume() const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Box::contains_closed(const Vec& x, double tol) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

bool Box::contains_half_open(const Vec& x) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] >= hi[i]) return false;
  return true;
}

bool Box::contains_open(const Vec& x) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (x[i] <= lo[i] || x[i] >= hi[i]) return false;
  return true;
}

double Box::boundary_distance(const Vec& x) const {
  double d = HUGE_VAL;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    d = std::min(d, std::abs(x[i] - lo[i]));
    d = std::min(d, std::abs(x[i] - hi[i]));
  }
  return d;
}

Basis::Basis(Mat cols) : t(std::move(cols)) {
  if (t.rows() != t.cols()) throw std::invalid_argument("Basis: square matrix required");
  if (std::abs(t.determinant()) <= kDefaultTol)
    throw std::invalid_argument("Basis: vectors are not linearly independent");
}

Parallelotope::Parallelotope(Mat linear, Vec half_widths, Vec off)
    : L(std::move(linear)), b(std::move(half_widths)), offset(std::move(off)) {
  if (L.rows() != L.cols()) throw std::invalid_argument("Parallelotope: square L required");
  if (b.size() != L.rows() || offset.size() != L.rows())
    throw std::invalid_argument("Parallelotope: dimension mismatch");
  if (b.minCoeff() <= 0.0) throw std::invalid_argument("Parallelotope: half widths must be > 0");
  if (std::abs(L.determinant()) <= kDefaultTol)
    throw std::invalid_argument("Parallelotope: singular linear part");
}

double Parallelotope::volume() const {
  double v = abs_det();
  for (Eigen::Index i = 0; i < b.size(); ++i) v *= 2.0 * b[i];
  return v;
}

std::vector<Vec> Parallelotope::vertices() const {
  int n = k();
  std::vector<Vec> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = (mask >> i) & 1 ? b[i] : -b[i];
    out.push_back(L * c + offset);
  }
  return out;
}

Parallelotope box_as_parallelotope(const Box& torus_box) {
  int n = torus_box.dim();
  Vec half = 0.5 * (torus_box.hi - torus_box.lo);
  return Parallelotope(Mat::Identity(n, n), half, torus_box.center());
}

double sup_operator_norm(const Mat& A) {
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

void for_each_frequency(int k, double M, const std::function<void(const IVec&)>& fn) {
  if (k < 1) throw std::invalid_argument("for_each_frequency: k >= 1 required");
  if (M < 1.0) throw std::invalid_argument("for_each_frequency: M >= 1 required");
  int Mi = static_cast<int>(std::floor(M));
  IVec m(k);
  std::function<void(int, bool)> rec = [&](int pos, bool all_zero) {
    if (pos == k) {
      if (!all_zero) fn(m);
      return;
    }
    for (int v = -Mi; v <= Mi; ++v) {
      m[pos] = v;
      rec(pos + 1, all_zero && v == 0);
    }
  };
  rec(0, true);
}

std::vector<IVec> enumerate_frequencies(double M, int k) {
  std::vector<IVec> out;
  for_each_frequency(k, M, [&out](const IVec& m) { out.push_back(m); });
  return out;
}

std::vector<IVec> enumerate_image_ball(const Mat& L, double M) {
  if (std::abs(L.determinant()) <= kDefaultTol)
    throw std::invalid_argument("enumerate_image_ball: singular L");
  int k = static_cast<int>(L.rows());
  Mat Lt = L.transpose();
  double lambda = sup_operator_norm(Lt.inverse());
  double scan = std::max(1.0, lambda * M);
  std::vector<IVec> out;
  for_each_frequency(k, scan, [&](const IVec& m) {
    Vec im = Lt * m.cast<double>();
    if (im.cwiseAbs().maxCoeff() <= M) out.push_back(m);
  });
  return out;
}

double r_weight(const Basis& T, const IVec& m) {
  double w = 1.0;
  Vec md = m.cast<double>();
  for (Eigen::Index i = 0; i < T.t.cols(); ++i) {
    double dot = std::abs(T.t.col(i).dot(md));
    if (dot > 1.0) w /= dot;
  }
  return w;
}

double r_weight_standard(const IVec& m) {
  double w = 1.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double a = std::abs(static_cast<double>(m[i]));
    if (a > 1.0) w /= a;
  }
  return w;
}

void check_torus_injective(const Box& torus_box) {
  for (Eigen::Index i = 0; i < torus_box.lo.size(); ++i)
    if (torus_box.hi[i] - torus_box.lo[i] >= 1.0)
      throw std::invalid_argument("torus box: diameter >= 1 along an axis, pi not injective");
}

// For each pair of vertices, the difference must stay away from Z^k: some
// coordinate has fractional distance from the integers exceeding tol, unless
// the difference is (numerically) the zero vector.
void check_torus_injective(const Parallelotope& U, double tol) {
  auto verts = U.vertices();
  for (std::size_t a = 0; a < verts.size(); ++a) {
    for (std::size_t c = a + 1; c < verts.size(); ++c) {
      Vec diff = verts[a] - verts[c];
      if (diff.cwiseAbs().maxCoeff() <= tol) continue;
      bool off_lattice = false;
      for (Eigen::Index i = 0; i < diff.size(); ++i) {
        double fd = std::abs(diff[i] - std::round(diff[i]));
        if (fd > tol) {
          off_lattice = true;
          break;
        }
      }
      if (!off_lattice)
        throw std::invalid_argument("parallelotope: vertex difference lies on Z^k, pi not injective");
    }
  }
}

bool box_membership(const Box& torus_box, const Vec& x) {
  check_torus_injective(torus_box);
  for (Eigen::Index i = 0; i < torus_box.lo.size(); ++i) {
    double len = torus_box.hi[i] - torus_box.lo[i];
    double rel = frac01(x[i] - torus_box.lo[i]);
    if (rel > len) return false;
  }
  return true;
}

bool box_membership(const Parallelotope& U, const Vec& x) {
  check_torus_injective(U);
  // candidate translates n with x + n in L*B + offset
  auto verts = U.vertices();
  Vec lo = verts[0], hi = verts[0];
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  int k = U.k();
  Mat Linv = U.L.inverse();
  std::vector<long> nlo(k), nhi(k);
  for (int i = 0; i < k; ++i) {
    nlo[i] = static_cast<long>(std::floor(lo[i] - x[i])) - 1;
    nhi[i] = static_cast<long>(std::ceil(hi[i] - x[i])) + 1;
  }
  std::vector<long> n(k, 0);
  std::function<bool(int)> rec = [&](int pos) -> bool {
    if (pos == k) {
      Vec y(k);
      for (int i = 0; i < k; ++i) y[i] = x[i] + static_cast<double>(n[i]) - U.offset[i];
      Vec c = Linv * y;
      for (int i = 0; i < k; ++i)
        if (std::abs(c[i]) > U.b[i]) return false;
      return true;
    }
    for (long v = nlo[pos]; v <= nhi[pos]; ++v) {
      n[pos] = v;
      if (rec(pos + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

}  // namespace apernet
