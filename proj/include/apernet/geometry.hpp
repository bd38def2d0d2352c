#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace apernet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

inline constexpr double kDefaultTol = 1e-9;

// componentwise fractional part into [0,1); throws on non-finite input
Vec torus_reduce(const Vec& x);
double frac01(double x);

// Axis-aligned box [lo_1,hi_1] x ... x [lo_n,hi_n]
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec l, Vec h);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  Vec center() const { return 0.5 * (lo + hi); }
  bool contains_closed(const Vec& x, double tol = 0.0) const;
  bool contains_half_open(const Vec& x) const;
  bool contains_open(const Vec& x) const;
  // distance of x from the boundary along the nearest axis
  double boundary_distance(const Vec& x) const;
};

// Basis t_1..t_k of R^k, stored as columns
struct Basis {
  Mat t;

  explicit Basis(Mat cols);
  int k() const { return static_cast<int>(t.rows()); }
  double det() const { return t.determinant(); }
};

// U = L*B + offset with B = prod [-b_i, b_i]; pi must be injective on U
struct Parallelotope {
  Mat L;
  Vec b;
  Vec offset;

  Parallelotope(Mat linear, Vec half_widths, Vec off);
  int k() const { return static_cast<int>(L.rows()); }
  double bmax() const { return b.maxCoeff(); }
  double abs_det() const { return std::abs(L.determinant()); }
  double volume() const;  // 2^k b_1...b_k |det L|
  std::vector<Vec> vertices() const;
};

Parallelotope box_as_parallelotope(const Box& torus_box);

// sup-norm operator norm (max absolute row sum)
double sup_operator_norm(const Mat& A);

// Nonzero m in Z^k with ||m||_inf <= M, lexicographic order.
void for_each_frequency(int k, double M, const std::function<void(const IVec&)>& fn);
std::vector<IVec> enumerate_frequencies(double M, int k);

// Nonzero m with ||L^t m||_inf <= M, found by scanning ||m|| <= lambda*M with
// lambda the sup operator norm of (L^t)^{-1}, then filtering. Lexicographic.
std::vector<IVec> enumerate_image_ball(const Mat& L, double M);

// r_T(m) = prod_i min(1, 1/|t_i . m|); a zero dot contributes factor 1
double r_weight(const Basis& T, const IVec& m);
// standard-basis case: prod_i min(1, 1/|m_i|)
double r_weight_standard(const IVec& m);

// pi-injectivity checks; throw std::invalid_argument on failure
void check_torus_injective(const Box& torus_box);
void check_torus_injective(const Parallelotope& U, double tol = kDefaultTol);

// true iff some integer translate of x lies in U (closed membership)
bool box_membership(const Box& torus_box, const Vec& x);
bool box_membership(const Parallelotope& U, const Vec& x);

}  // namespace apernet
