#include <doctest.h>

#include "apernet/netgen.hpp"
#include "apernet/pointset_io.hpp"
#include "apernet/rng.hpp"

#include <cmath>
#include <sstream>

using namespace apernet;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

FlowSpec golden_flow(double x0 = 0.0, double x1 = 0.0) {
  Mat A(2, 1);
  A << 1.0, kPhi;
  return FlowSpec(A, vec2(x0, x1));
}

Section golden_section(double lo, double hi) {
  Mat W(2, 1);
  W << 0.0, 1.0;
  return Section(W, Vec::Zero(2), {Box(vec1(lo), vec1(hi))});
}

// independent membership check: pi(y) in S by scanning integer translates
// around the section bounding box
bool torus_point_in_section(const Section& s, const Vec& y) {
  int k = s.k(), c = s.codim();
  Box bb = s.bounding();
  Eigen::FullPivHouseholderQR<Mat> qr(s.W);
  // candidate translates from the embedded shape's corner range
  std::vector<double> lo(k, HUGE_VAL), hi(k, -HUGE_VAL);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c); ++mask) {
    Vec corner(c);
    for (int i = 0; i < c; ++i) corner[i] = (mask >> i) & 1 ? bb.hi[i] : bb.lo[i];
    Vec v = s.anchor + s.W * corner - y;
    for (int i = 0; i < k; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  }
  std::vector<long> n(k);
  std::function<bool(int)> rec = [&](int pos) -> bool {
    if (pos == k) {
      Vec target(k);
      for (int i = 0; i < k; ++i) target[i] = y[i] + static_cast<double>(n[i]) - s.anchor[i];
      Vec cc = qr.solve(target);
      if ((s.W * cc - target).cwiseAbs().maxCoeff() > 1e-8) return false;
      return s.contains(cc);
    }
    for (long v = static_cast<long>(std::floor(lo[pos])) - 1;
         v <= static_cast<long>(std::ceil(hi[pos])) + 1; ++v) {
      n[pos] = v;
      if (rec(pos + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

}  // namespace

TEST_CASE("golden flow visit set matches the direct oracle") {
  auto ps = visit_set(golden_flow(), golden_section(0.0, 0.5), Box(vec1(0), vec1(10)));
  std::vector<double> expect;
  for (int n = 0; n <= 10; ++n)
    if (std::fmod(n * kPhi, 1.0) < 0.5) expect.push_back(n);
  REQUIRE(ps.pts.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK(std::abs(ps.pts[i][0] - expect[i]) < 1e-9);
}

TEST_CASE("rational flow with a full fiber section gives a lattice") {
  Mat A(2, 1);
  A << 1.0, 0.0;
  FlowSpec flow(A, Vec::Zero(2));
  auto ps = visit_set(flow, golden_section(0.0, 0.9), Box(vec1(-5), vec1(5)));
  REQUIRE(ps.pts.size() == 11);
  for (int i = 0; i < 11; ++i) CHECK(std::abs(ps.pts[i][0] - (i - 5)) < 1e-9);
}

TEST_CASE("points on the section boundary are flagged") {
  // base point 0 lands exactly on the lower section edge at a = 0
  auto ps = visit_set(golden_flow(), golden_section(0.0, 0.25), Box(vec1(0), vec1(30)));
  REQUIRE(!ps.pts.empty());
  CHECK(std::abs(ps.pts[0][0]) < 1e-12);
  REQUIRE(ps.boundary_flags.size() == 1);
  CHECK(ps.boundary_flags[0] == 0);
}

TEST_CASE("empty section gives an empty set") {
  Mat W(2, 1);
  W << 0.0, 1.0;
  Section empty(W, Vec::Zero(2), {});
  auto ps = visit_set(golden_flow(), empty, Box(vec1(0), vec1(10)));
  CHECK(ps.pts.empty());
}

TEST_CASE("non-transverse section is rejected") {
  Mat W(2, 1);
  W << 1.0, kPhi;  // parallel to the flow
  Section s(W, Vec::Zero(2), {Box(vec1(0), vec1(0.3))});
  CHECK_THROWS(visit_set(golden_flow(), s, Box(vec1(0), vec1(5))));
}

TEST_CASE("visit points re-verify against the section") {
  auto flow = golden_flow(0.3, 0.45);
  auto section = golden_section(0.2, 0.55);
  auto ps = visit_set(flow, section, Box(vec1(-40), vec1(40)));
  REQUIRE(ps.pts.size() > 10);
  for (const auto& a : ps.pts) {
    Vec y = flow.x + flow.A * a;
    CHECK(torus_point_in_section(section, y));
  }
}

TEST_CASE("translation covariance") {
  auto flow0 = golden_flow(0.1, 0.7);
  auto section = golden_section(0.15, 0.6);
  double v0 = 7.3;
  FlowSpec shifted(flow0.A, flow0.x + flow0.A * vec1(v0));
  auto a0 = visit_set(flow0, section, Box(vec1(-30), vec1(30)));
  auto a1 = visit_set(shifted, section, Box(vec1(-30 - v0), vec1(30 - v0)));
  // interior agreement, away from both window edges
  std::vector<double> s0, s1;
  for (const auto& p : a0.pts)
    if (std::abs(p[0]) < 20) s0.push_back(p[0]);
  for (const auto& p : a1.pts)
    if (std::abs(p[0] + v0) < 20) s1.push_back(p[0] + v0);
  REQUIRE(s0.size() == s1.size());
  for (std::size_t i = 0; i < s0.size(); ++i) CHECK(std::abs(s0[i] - s1[i]) < 1e-9);
}

TEST_CASE("cut and project: rational axis case") {
  Mat L = Mat::Identity(2, 2);
  Mat Vb(2, 1), Wb(2, 1);
  Vb << 1, 0;
  Wb << 0, 1;
  auto ps = cut_and_project(L, Vb, Wb, {Box(vec1(-0.25), vec1(0.25))}, Box(vec1(-4), vec1(4)));
  REQUIRE(ps.pts.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(ps.pts[i][0] - (i - 4)) < 1e-9);

  // empty window union gives the empty set
  auto none = cut_and_project(L, Vb, Wb, {}, Box(vec1(-4), vec1(4)));
  CHECK(none.pts.empty());
}

TEST_CASE("generator agreement between visit_set and cut_and_project") {
  Rng rng(2024);
  int done = 0;
  for (int trial = 0; done < 20 && trial < 60; ++trial) {
    int k = 2 + static_cast<int>(rng.below(3));
    int d = 1 + static_cast<int>(rng.below(std::min(2, k - 1)));
    Mat G = Mat::Identity(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) G(i, j) += rng.uniform(-0.2, 0.2);
    Mat U(k, d), Wb(k, k - d);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < d; ++j) U(i, j) = rng.uniform(-1, 1);
      for (int j = 0; j < k - d; ++j) Wb(i, j) = rng.uniform(-1, 1);
    }
    Mat split(k, k);
    split.leftCols(d) = U;
    split.rightCols(k - d) = Wb;
    if (std::abs(split.determinant()) < 0.05) continue;

    Vec Klo(k - d), Khi(k - d);
    for (int j = 0; j < k - d; ++j) {
      Klo[j] = rng.uniform(-0.15, 0.0);
      Khi[j] = Klo[j] + rng.uniform(0.02, 0.12);
    }
    Box K(Klo, Khi);
    Vec wlo(d), whi(d);
    for (int j = 0; j < d; ++j) {
      wlo[j] = -4.0;
      whi[j] = 4.0;
    }
    Box window(wlo, whi);

    PointSet cap;
    try {
      cap = cut_and_project(G, U, Wb, {K}, window);
    } catch (const std::exception&) {
      continue;
    }

    // matching toral flow: V' = G^{-1} U acting at base 0 with section -K on
    // the plane G^{-1} W
    Mat Ginv = G.inverse();
    FlowSpec flow(Ginv * U, Vec::Zero(k));
    Box negK(-Khi, -Klo);
    PointSet vis;
    try {
      Section s(Ginv * Wb, Vec::Zero(k), {negK});
      vis = visit_set(flow, s, window);
    } catch (const std::exception&) {
      continue;  // pi not injective on this random section; draw again
    }

    REQUIRE_MESSAGE(cap.pts.size() == vis.pts.size(), "k=", k, " d=", d, " trial=", trial);
    for (std::size_t i = 0; i < cap.pts.size(); ++i)
      CHECK((cap.pts[i] - vis.pts[i]).cwiseAbs().maxCoeff() < 1e-9);
    ++done;
  }
  CHECK(done == 20);
}

TEST_CASE("separation and covering estimates") {
  PointSet grid;
  grid.dim = 2;
  grid.window = Box(vec2(0, 0), vec2(10, 10));
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) grid.pts.push_back(vec2(i, j));
  auto [r, R] = separation_covering(grid, 0.25, 3.0);
  CHECK(r == doctest::Approx(1.0));
  CHECK(R == doctest::Approx(std::sqrt(2.0) / 2).epsilon(0.05));

  PointSet doubled;
  doubled.dim = 2;
  doubled.window = Box(vec2(0, 0), vec2(20, 20));
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) doubled.pts.push_back(vec2(2 * i, 2 * j));
  CHECK(separation_covering(doubled).first == doctest::Approx(2.0));

  auto golden = visit_set(golden_flow(), golden_section(0.0, 0.5), Box(vec1(0), vec1(200)));
  CHECK(separation_covering(golden).first == doctest::Approx(1.0).epsilon(1e-9));

  PointSet lonely;
  lonely.dim = 1;
  lonely.window = Box(vec1(0), vec1(1));
  lonely.pts.push_back(vec1(0.5));
  CHECK_THROWS(separation_covering(lonely));
}

TEST_CASE("visit density") {
  CHECK(visit_density(golden_flow(), golden_section(0.0, 0.5)) == doctest::Approx(0.5));
  auto big = visit_set(golden_flow(), golden_section(0.0, 0.5), Box(vec1(0), vec1(5000)));
  double density = static_cast<double>(big.pts.size()) / 5000.0;
  CHECK(density == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("interlace union") {
  // r = 1 passes through
  PointSet a;
  a.dim = 1;
  a.window = Box(vec1(-10), vec1(10));
  LatticeMatching ma;
  Mat L2 = Mat::Identity(1, 1) * 2.0;
  for (int i = -4; i <= 4; ++i) {
    a.pts.push_back(vec1(2 * i + 0.3));
    Eigen::VectorXi z(1);
    z << i;
    ma.targets.push_back(z);
  }
  auto single = interlace_union({a}, {ma}, L2);
  CHECK(single.max_displacement == doctest::Approx(0.3));
  CHECK(single.refined_basis(0, 0) == doctest::Approx(2.0));

  // two translated copies of 2Z, both matched to 2Z, interlace to Z
  PointSet b = a;
  for (auto& p : b.pts) p[0] += 0.7;  // disjoint from a
  auto merged = interlace_union({a, b}, {ma, ma}, L2);
  CHECK(merged.refined_basis(0, 0) == doctest::Approx(1.0));
  REQUIRE(merged.targets.size() == 18);
  // targets hit 2Z and 2Z+1: a full Z window, each once
  std::vector<double> tg;
  for (const auto& t : merged.targets) tg.push_back(t[0]);
  std::sort(tg.begin(), tg.end());
  for (std::size_t i = 1; i < tg.size(); ++i) CHECK(tg[i] - tg[i - 1] == doctest::Approx(1.0));
  // displacement bounded by original + coset diameter
  CHECK(merged.max_displacement <= 0.7 + 1.0 + 1e-12);

  // r = 2 in R^2 onto 2Z x Z refines to Z^2 with coset reps (0,0), (1,0)
  PointSet p1, p2;
  p1.dim = p2.dim = 2;
  p1.window = p2.window = Box(vec2(-6, -6), vec2(6, 6));
  LatticeMatching m2;
  Mat L22(2, 2);
  L22 << 2, 0, 0, 1;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      p1.pts.push_back(vec2(2 * i + 0.1, j + 0.2));
      p2.pts.push_back(vec2(2 * i - 0.4, j + 0.6));
      Eigen::VectorXi z(2);
      z << i, j;
      m2.targets.push_back(z);
    }
  auto two = interlace_union({p1, p2}, {m2, m2}, L22);
  CHECK(two.refined_basis(0, 0) == doctest::Approx(1.0));
  CHECK(two.coset_reps[0].isZero());
  CHECK(two.coset_reps[1][0] == doctest::Approx(1.0));
  CHECK(two.coset_reps[1][1] == doctest::Approx(0.0));
  // bijection onto a Z^2 window
  std::vector<std::pair<double, double>> seen;
  for (const auto& t : two.targets) seen.emplace_back(t[0], t[1]);
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());

  // overlapping nets are rejected
  CHECK_THROWS(interlace_union({a, a}, {ma, ma}, L2));
}

TEST_CASE("pointset file round trip") {
  auto ps = visit_set(golden_flow(0.2, 0.1), golden_section(0.1, 0.62), Box(vec1(0), vec1(50)));
  ps.meta = {{"note", "golden"}};
  std::stringstream ss;
  write_pointset(ss, ps);
  auto back = read_pointset(ss);
  REQUIRE(back.pts.size() == ps.pts.size());
  CHECK(back.dim == 1);
  CHECK(back.generator == "visit_set");
  for (std::size_t i = 0; i < ps.pts.size(); ++i)
    CHECK(std::abs(back.pts[i][0] - ps.pts[i][0]) < 1e-9);  // 12 significant digits
}
