#include "apernet/bdmatch.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace apernet {

namespace {

bool lex_less_vec(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// adjacency through grid buckets of cell size rho
std::vector<std::vector<int>> build_adjacency(const std::vector<Vec>& from,
                                              const std::vector<int>& from_idx,
                                              const std::vector<Vec>& to, double rho, int d) {
  double cell = std::max(rho, 1e-9);
  std::map<std::vector<long>, std::vector<int>> buckets;
  for (std::size_t j = 0; j < to.size(); ++j) {
    std::vector<long> key(d);
    for (int i = 0; i < d; ++i) key[i] = static_cast<long>(std::floor(to[j][i] / cell));
    buckets[key].push_back(static_cast<int>(j));
  }
  std::vector<std::vector<int>> adj(from_idx.size());
  std::vector<long> nb(d);
  for (std::size_t q = 0; q < from_idx.size(); ++q) {
    const Vec& p = from[static_cast<std::size_t>(from_idx[q])];
    std::vector<long> key(d);
    for (int i = 0; i < d; ++i) key[i] = static_cast<long>(std::floor(p[i] / cell));
    std::function<void(int)> rec = [&](int pos) {
      if (pos == d) {
        auto it = buckets.find(nb);
        if (it == buckets.end()) return;
        for (int j : it->second)
          if ((to[static_cast<std::size_t>(j)] - p).norm() <= rho) adj[q].push_back(j);
        return;
      }
      for (long o = -1; o <= 1; ++o) {
        nb[pos] = key[pos] + o;
        rec(pos + 1);
      }
    };
    rec(0);
    std::sort(adj[q].begin(), adj[q].end());
  }
  return adj;
}

// Hopcroft-Karp on the prepared adjacency; left side indexed 0..nl-1
struct HopcroftKarp {
  const std::vector<std::vector<int>>& adj;
  int nl, nr;
  std::vector<int> ml, mr, dist;

  HopcroftKarp(const std::vector<std::vector<int>>& a, int right)
      : adj(a), nl(static_cast<int>(a.size())), nr(right), ml(nl, -1), mr(nr, -1), dist(nl) {}

  bool bfs() {
    std::deque<int> q;
    bool reachable_free = false;
    for (int u = 0; u < nl; ++u) {
      if (ml[u] < 0) {
        dist[u] = 0;
        q.push_back(u);
      } else {
        dist[u] = -1;
      }
    }
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        int w = mr[v];
        if (w < 0) {
          reachable_free = true;
        } else if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push_back(w);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(int u) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      int w = mr[v];
      if (w < 0 || (dist[w] == dist[u] + 1 && dfs(w))) {
        ml[u] = v;
        mr[v] = u;
        return true;
      }
    }
    dist[u] = -1;
    return false;
  }

  int run() {
    int matched = 0;
    while (bfs()) {
      for (int u = 0; u < nl; ++u)
        if (ml[u] < 0 && dfs(u)) ++matched;
    }
    return matched;
  }
};

}  // namespace

MatchInstance build_instance(const PointSet& Y, const Mat& lattice, double lambda,
                             const Box& window, double rho) {
  int d = Y.dim;
  if (lattice.rows() != d || lattice.cols() != d)
    throw std::invalid_argument("build_instance: lattice dimension mismatch");
  if (rho < 0.0) throw std::invalid_argument("build_instance: rho must be >= 0");
  double covol = std::abs(lattice.determinant());
  if (std::abs(covol - 1.0 / lambda) > 1e-6)
    throw std::invalid_argument("build_instance: lattice covolume does not match 1/lambda");
  for (int i = 0; i < d; ++i)
    if (window.lo[i] - rho < Y.window.lo[i] - kDefaultTol ||
        window.hi[i] + rho > Y.window.hi[i] + kDefaultTol)
      throw std::invalid_argument("build_instance: Y was not generated with rho padding");

  MatchInstance inst;
  inst.dim = d;
  inst.rho = rho;
  inst.core = window;

  Box padded(window.lo.array() - rho - 1e-9, window.hi.array() + rho + 1e-9);
  for (const auto& p : Y.pts)
    if (padded.contains_closed(p)) inst.side_a.push_back(p);
  std::sort(inst.side_a.begin(), inst.side_a.end(), lex_less_vec);
  for (std::size_t i = 0; i < inst.side_a.size(); ++i)
    if (window.contains_closed(inst.side_a[i])) inst.core_a.push_back(static_cast<int>(i));

  for (const auto& n : detail::lattice_points_in_box(lattice, Vec::Zero(d), padded)) {
    Vec p = lattice * n.cast<double>();
    if (padded.contains_closed(p)) inst.side_b.push_back(p);
  }
  std::sort(inst.side_b.begin(), inst.side_b.end(), lex_less_vec);
  return inst;
}

MatchResult max_matching(const MatchInstance& inst) {
  auto adj = build_adjacency(inst.side_a, inst.core_a, inst.side_b, inst.rho, inst.dim);
  HopcroftKarp hk(adj, static_cast<int>(inst.side_b.size()));
  int matched = hk.run();

  MatchResult res;
  res.deficiency = static_cast<long>(inst.core_a.size()) - matched;
  for (std::size_t q = 0; q < inst.core_a.size(); ++q) {
    if (hk.ml[static_cast<int>(q)] >= 0) {
      int b = hk.ml[static_cast<int>(q)];
      res.pairs.emplace_back(inst.core_a[q], b);
      double disp =
          (inst.side_a[static_cast<std::size_t>(inst.core_a[q])] - inst.side_b[static_cast<std::size_t>(b)])
              .norm();
      res.max_displacement = std::max(res.max_displacement, disp);
    }
  }
  return res;
}

std::optional<double> min_bd_radius(const PointSet& Y, const Mat& lattice, double lambda,
                                    const Box& window, double rho_max) {
  MatchInstance inst = build_instance(Y, lattice, lambda, window, rho_max);
  auto deficiency_at = [&](double rho) {
    MatchInstance trial = inst;
    trial.rho = rho;
    return max_matching(trial).deficiency;
  };
  if (deficiency_at(rho_max) > 0) return std::nullopt;
  double lo = 0.0, hi = rho_max;
  if (deficiency_at(0.0) == 0) return 0.0;
  while (hi - lo > 1e-3) {
    double mid = 0.5 * (lo + hi);
    if (deficiency_at(mid) == 0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

CubeUnion CubeUnion::from_cubes(int d, std::vector<std::vector<long>> corners) {
  CubeUnion c;
  c.d = d;
  for (auto& v : corners)
    if (static_cast<int>(v.size()) != d)
      throw std::invalid_argument("CubeUnion: corner dimension mismatch");
  std::sort(corners.begin(), corners.end());
  corners.erase(std::unique(corners.begin(), corners.end()), corners.end());
  c.cubes = std::move(corners);
  return c;
}

bool CubeUnion::contains(const std::vector<long>& corner) const {
  return std::binary_search(cubes.begin(), cubes.end(), corner);
}

double boundary_measure(const CubeUnion& C) {
  double exposed = 0.0;
  for (const auto& c : C.cubes) {
    for (int i = 0; i < C.d; ++i) {
      for (long off : {-1L, 1L}) {
        auto nb = c;
        nb[static_cast<std::size_t>(i)] += off;
        if (!C.contains(nb)) exposed += 1.0;
      }
    }
  }
  return exposed;
}

double laczkovich_ratio(const PointSet& Y, double lambda, const CubeUnion& C) {
  if (C.cubes.empty()) throw std::invalid_argument("laczkovich_ratio: empty cube union");
  if (C.d != Y.dim) throw std::invalid_argument("laczkovich_ratio: dimension mismatch");
  for (const auto& c : C.cubes)
    for (int i = 0; i < C.d; ++i)
      if (static_cast<double>(c[static_cast<std::size_t>(i)]) < Y.window.lo[i] - kDefaultTol ||
          static_cast<double>(c[static_cast<std::size_t>(i)] + 1) > Y.window.hi[i] + kDefaultTol)
        throw std::invalid_argument("laczkovich_ratio: cube union exceeds the window");

  long count = 0;
  std::vector<long> corner(C.d);
  for (const auto& p : Y.pts) {
    for (int i = 0; i < C.d; ++i) corner[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(p[i]));
    if (C.contains(corner)) ++count;
  }
  double disc = std::abs(static_cast<double>(count) - lambda * C.volume());
  return disc / boundary_measure(C);
}

namespace {

// dense voxel grid with inclusion-exclusion prefix sums
struct VoxelCounter {
  int d;
  std::vector<long> lo, size, stride;
  std::vector<long> pref;  // prefix-summed occupancy

  explicit VoxelCounter(const CubeUnion& C) : d(C.d) {
    lo.assign(d, 0);
    std::vector<long> hi(d, 0);
    for (int i = 0; i < d; ++i) {
      lo[i] = C.cubes[0][static_cast<std::size_t>(i)];
      hi[i] = lo[i];
    }
    for (const auto& c : C.cubes)
      for (int i = 0; i < d; ++i) {
        lo[i] = std::min(lo[i], c[static_cast<std::size_t>(i)]);
        hi[i] = std::max(hi[i], c[static_cast<std::size_t>(i)]);
      }
    size.assign(d, 0);
    stride.assign(d, 1);
    long total = 1;
    for (int i = 0; i < d; ++i) {
      size[i] = hi[i] - lo[i] + 1;
      total *= size[i];
      if (total > 100'000'000L) throw std::invalid_argument("dyadic_decompose: region too large");
    }
    for (int i = 1; i < d; ++i) stride[i] = stride[i - 1] * size[i - 1];
    pref.assign(static_cast<std::size_t>(total), 0);
    for (const auto& c : C.cubes) {
      long idx = 0;
      for (int i = 0; i < d; ++i) idx += (c[static_cast<std::size_t>(i)] - lo[i]) * stride[i];
      pref[static_cast<std::size_t>(idx)] = 1;
    }
    // in-place prefix sums along each axis
    for (int axis = 0; axis < d; ++axis) {
      long total_cells = total;
      for (long idx = 0; idx < total_cells; ++idx) {
        long coord = (idx / stride[axis]) % size[axis];
        if (coord > 0) pref[static_cast<std::size_t>(idx)] += pref[static_cast<std::size_t>(idx - stride[axis])];
      }
    }
  }

  // cumulative occupancy over grid corners <= x (componentwise, inclusive)
  long cum(const std::vector<long>& x) const {
    long idx = 0;
    for (int i = 0; i < d; ++i) {
      if (x[static_cast<std::size_t>(i)] < 0) return 0;
      idx += std::min(x[static_cast<std::size_t>(i)], size[i] - 1) * stride[i];
    }
    return pref[static_cast<std::size_t>(idx)];
  }

  // occupancy count of [a, b) in absolute cube coordinates
  long count(const std::vector<long>& a, const std::vector<long>& b) const {
    long total = 0;
    std::vector<long> corner(d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      int sign = 1;
      for (int i = 0; i < d; ++i) {
        if (mask & (1u << i)) {
          corner[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] - lo[i] - 1;
          sign = -sign;
        } else {
          corner[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - lo[i] - 1;
        }
      }
      total += sign * cum(corner);
    }
    return total;
  }
};

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

std::vector<SignedCube> dyadic_decompose(const CubeUnion& C) {
  std::vector<SignedCube> out;
  if (C.cubes.empty()) return out;
  int d = C.d;
  VoxelCounter vc(C);

  long max_extent = 0;
  for (int i = 0; i < d; ++i) max_extent = std::max(max_extent, vc.size[i]);
  int J = 0;
  while ((1L << J) < max_extent) ++J;
  long side = 1L << J;

  // aligned root cells covering the bounding box
  std::vector<long> root_lo(d), root_hi(d);
  for (int i = 0; i < d; ++i) {
    root_lo[i] = floor_div(vc.lo[i], side);
    root_hi[i] = floor_div(vc.lo[i] + vc.size[i] - 1, side);
  }

  // target = true: reconstruct C inside the block; false: its complement
  std::function<void(std::vector<long>&, int, bool, int)> rec = [&](std::vector<long>& corner,
                                                                    int level, bool target_c,
                                                                    int sign) {
    long s = 1L << level;
    std::vector<long> b(corner.begin(), corner.end());
    for (int i = 0; i < d; ++i) b[static_cast<std::size_t>(i)] += s;
    long inC = vc.count(corner, b);
    double volume = std::pow(2.0, level * d);
    long in_target = target_c ? inC : static_cast<long>(volume) - inC;
    if (in_target == 0) return;
    if (in_target == static_cast<long>(volume)) {
      out.push_back({corner, level, sign});
      return;
    }
    if (2 * in_target > static_cast<long>(volume)) {
      out.push_back({corner, level, sign});
      target_c = !target_c;
      sign = -sign;
    }
    long half = s / 2;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      std::vector<long> child = corner;
      for (int i = 0; i < d; ++i)
        if (mask & (1u << i)) child[static_cast<std::size_t>(i)] += half;
      rec(child, level - 1, target_c, sign);
    }
  };

  std::vector<long> idx(d);
  std::function<void(int)> roots = [&](int pos) {
    if (pos == d) {
      std::vector<long> corner(d);
      for (int i = 0; i < d; ++i) corner[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)] * side;
      rec(corner, J, true, 1);
      return;
    }
    for (long v = root_lo[static_cast<std::size_t>(pos)]; v <= root_hi[static_cast<std::size_t>(pos)]; ++v) {
      idx[static_cast<std::size_t>(pos)] = v;
      roots(pos + 1);
    }
  };
  roots(0);
  return out;
}

std::vector<long> decomposition_level_counts(const std::vector<SignedCube>& cubes) {
  int top = 0;
  for (const auto& c : cubes) top = std::max(top, c.level);
  std::vector<long> counts(static_cast<std::size_t>(top + 1), 0);
  for (const auto& c : cubes) ++counts[static_cast<std::size_t>(c.level)];
  return counts;
}

}  // namespace apernet
