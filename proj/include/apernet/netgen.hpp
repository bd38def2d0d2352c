#pragma once

#include "apernet/geometry.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace apernet {

// Linear R^d-action on T^k: t -> pi(x + A t), columns of A are v_1..v_d.
struct FlowSpec {
  Mat A;  // k x d
  Vec x;  // base point, torus coordinates

  FlowSpec(Mat acting, Vec base);
  int k() const { return static_cast<int>(A.rows()); }
  int d() const { return static_cast<int>(A.cols()); }
};

enum class ContainMode { Open, HalfOpen, Closed };

// Bounded subset of an affine (k-d)-plane: anchor + W*c with c ranging over a
// disjoint union of boxes (half-open by convention).
struct Section {
  Mat W;                  // k x (k-d) plane basis
  Vec anchor;             // offset in R^k
  std::vector<Box> boxes; // shapes in W-coordinates

  Section(Mat plane, Vec anchor_point, std::vector<Box> shape);
  int k() const { return static_cast<int>(W.rows()); }
  int codim() const { return static_cast<int>(W.cols()); }
  bool contains(const Vec& c, ContainMode mode = ContainMode::HalfOpen) const;
  double boundary_distance(const Vec& c) const;
  Box bounding() const;
  double measure() const;  // total shape volume in W-coordinates
};

struct PointSet {
  int dim = 0;
  std::vector<Vec> pts;          // sorted lexicographically
  Box window;
  std::string generator;
  nlohmann::json meta;
  std::vector<std::size_t> boundary_flags;  // indices of points within 1e-9 of a section boundary
};

// Visit set {a in window : pi(x + A a) in S}; solves the k x k system
// x + A a = n + anchor + W c over candidate integer translates n.
PointSet visit_set(const FlowSpec& flow, const Section& section, const Box& window);

// Cut-and-project: {coords of pi_V(y) : y in L, pi_W(y) in K} clipped to the
// physical window. K is a union of half-open boxes in W-coordinates (empty
// union gives the empty set); output coordinates are w.r.t. the columns of Vb.
PointSet cut_and_project(const Mat& lattice_basis, const Mat& Vb, const Mat& Wb,
                         const std::vector<Box>& K, const Box& phys_window);

// Expected density of the visit set per unit window volume (a-coordinates).
double visit_density(const FlowSpec& flow, const Section& section);

// (r_est, R_est): minimum pairwise gap and probe-grid covering radius.
// probe_spacing < 0 uses r_est/4; the probe grid stays erode_margin (< 0:
// 3 r_est) inside the window to dodge generation-boundary artifacts.
std::pair<double, double> separation_covering(const PointSet& ps, double probe_spacing = -1.0,
                                              double erode_margin = -1.0);

// Matching of one net onto a lattice window: targets[i] = integer coordinates
// (w.r.t. the lattice basis) assigned to pts[i].
struct LatticeMatching {
  std::vector<Eigen::VectorXi> targets;
};

struct InterlaceResult {
  Mat refined_basis;               // superlattice of index r
  std::vector<Vec> coset_reps;
  std::vector<Vec> points;         // disjoint union, net order preserved
  std::vector<Vec> targets;        // matched point in the refined lattice
  double max_displacement = 0.0;
};

// Merges r nets, each matched to the same window of the lattice spanned by
// lattice_basis, into one matching onto an index-r refinement.
InterlaceResult interlace_union(const std::vector<PointSet>& nets,
                                const std::vector<LatticeMatching>& matchings,
                                const Mat& lattice_basis);

namespace detail {
// All n in Z^k with Bi*n + t inside ubox (small slack included); exact
// membership is re-checked by callers. LLL + Fincke-Pohst under the hood.
std::vector<Eigen::VectorXi> lattice_points_in_box(const Mat& Bi, const Vec& t, const Box& ubox);
}  // namespace detail

}  // namespace apernet
