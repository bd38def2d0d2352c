#pragma once

#include "apernet/geometry.hpp"
#include "apernet/netgen.hpp"

#include <cstdint>
#include <optional>

namespace apernet {

// Rational subspace Q = span of integer vectors, with a primitive basis of
// Q n Z^k (the input is saturated automatically). The unit-parameter
// fundamental domain {sum u_j q_j : u_j in [0,1)} tiles Q under Q n Z^k.
struct RationalSubspace {
  Eigen::MatrixXi basis;  // k x d, primitive columns

  int k() const { return static_cast<int>(basis.rows()); }
  int d() const { return static_cast<int>(basis.cols()); }
  double domain_volume() const;  // d-volume of the fundamental parallelotope
};

RationalSubspace make_rational_subspace(const Eigen::MatrixXi& B);

struct OrbitCount {
  long open_count = 0;    // # (Q.x n S)
  long closed_count = 0;  // # (Q.x n closure(S))
  bool boundary_hit = false;
};

OrbitCount orbit_section_count(const RationalSubspace& Q, const Vec& x, const Section& S);

struct CorrelationWitness {
  Vec x1, x2;
  long count1 = 0, count2 = 0;
};

// Samples random base points looking for two orbits with clean (open ==
// closed) but different intersection counts.
std::optional<CorrelationWitness> not_correlated_test(const RationalSubspace& Q, const Section& S,
                                                      int sample_count, std::uint64_t seed);

// Dilates the fundamental domain N-fold about its center (N^d translated
// copies) and returns |#(M.x n S) - lambda |M|| / |(boundary M)^(1)|, the
// boundary set measured as facet areas inflated to thickness-2 slabs.
double dilated_domain_discrepancy(const RationalSubspace& Q, const Section& S, const Vec& x,
                                  double lambda, long N);

}  // namespace apernet
