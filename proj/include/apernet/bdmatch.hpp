#pragma once

#include "apernet/geometry.hpp"
#include "apernet/netgen.hpp"

#include <optional>
#include <vector>

namespace apernet {

// Bipartite instance: net points against a padded lattice window, edges given
// lazily by the distance-rho predicate through grid buckets.
struct MatchInstance {
  std::vector<Vec> side_a;          // net points
  std::vector<Vec> side_b;          // lattice points, padded by rho
  std::vector<int> core_a;          // indices of side_a inside the core window
  double rho = 0.0;
  Box core;
  int dim = 0;
};

MatchInstance build_instance(const PointSet& Y, const Mat& lattice, double lambda,
                             const Box& window, double rho);

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (side_a index, side_b index)
  long deficiency = 0;                     // unmatched core-side count
  double max_displacement = 0.0;
};

// Maximum-cardinality matching of the core side_a points into side_b
// (Hopcroft-Karp layered augmentation, deterministic order).
MatchResult max_matching(const MatchInstance& inst);

// Smallest rho (bisected to 1e-3) with zero deficiency; nullopt when even
// rho_max leaves someone unmatched.
std::optional<double> min_bd_radius(const PointSet& Y, const Mat& lattice, double lambda,
                                    const Box& window, double rho_max);

// Finite union of integer-cornered unit cubes.
struct CubeUnion {
  int d = 0;
  std::vector<std::vector<long>> cubes;  // lower corners, each of length d

  static CubeUnion from_cubes(int d, std::vector<std::vector<long>> corners);
  bool contains(const std::vector<long>& corner) const;
  double volume() const { return static_cast<double>(cubes.size()); }
};

// (d-1)-dimensional boundary measure: the number of exposed unit facets.
double boundary_measure(const CubeUnion& C);

double laczkovich_ratio(const PointSet& Y, double lambda, const CubeUnion& C);

struct SignedCube {
  std::vector<long> corner;  // lower corner, multiple of 2^level
  int level = 0;             // side 2^level
  int sign = 1;
};

// chi_C as a +-1 combination of dyadic cubes, each used once; greedy
// majority-coarsening of the dyadic tree.
std::vector<SignedCube> dyadic_decompose(const CubeUnion& C);

// per-level cube counts of a decomposition, index = level
std::vector<long> decomposition_level_counts(const std::vector<SignedCube>& cubes);

}  // namespace apernet
