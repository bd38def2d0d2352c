#include <doctest.h>

#include "apernet/geometry.hpp"
#include "apernet/rng.hpp"

#include <algorithm>
#include <set>
#include <vector>

using namespace apernet;

namespace {
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("torus_reduce basics") {
  Vec r = torus_reduce(vec2(1.5, -0.25));
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(torus_reduce(vec2(0, 0)).isZero());
  CHECK(torus_reduce(vec2(2.0, 3.0)).isZero());
  Vec bad(1);
  bad << std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(torus_reduce(bad), std::domain_error);
}

TEST_CASE("torus_reduce is idempotent and additive mod 1") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    Vec a = vec2(rng.uniform(-20, 20), rng.uniform(-20, 20));
    Vec b = vec2(rng.uniform(-20, 20), rng.uniform(-20, 20));
    Vec ra = torus_reduce(a);
    CHECK((torus_reduce(ra) - ra).cwiseAbs().maxCoeff() == 0.0);
    Vec lhs = torus_reduce(a + b);
    Vec rhs = torus_reduce(torus_reduce(a) + torus_reduce(b));
    for (int j = 0; j < 2; ++j) {
      double d = std::abs(lhs[j] - rhs[j]);
      d = std::min(d, 1.0 - d);  // same torus point
      CHECK(d < 1e-12);
    }
  }
}

TEST_CASE("enumerate_frequencies counts and order") {
  auto f1 = enumerate_frequencies(3, 1);
  REQUIRE(f1.size() == 6);
  CHECK(f1.front()[0] == -3);
  CHECK(f1.back()[0] == 3);

  CHECK(enumerate_frequencies(1, 2).size() == 8);
  CHECK(enumerate_frequencies(2, 3).size() == 124);

  // deterministic lexicographic order
  auto f2 = enumerate_frequencies(1, 2);
  auto sorted = f2;
  std::sort(sorted.begin(), sorted.end(), [](const IVec& a, const IVec& b) {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  CHECK(std::equal(f2.begin(), f2.end(), sorted.begin()));
}

TEST_CASE("enumerate_image_ball") {
  Mat I2 = Mat::Identity(2, 2);
  auto a = enumerate_image_ball(I2, 1);
  auto b = enumerate_frequencies(1, 2);
  REQUIRE(a.size() == b.size());
  CHECK(std::equal(a.begin(), a.end(), b.begin()));

  // identity agreement for random M <= 8, k <= 3
  Rng rng(5);
  for (int t = 0; t < 6; ++t) {
    int k = 1 + static_cast<int>(rng.below(3));
    double M = 1.0 + rng.uniform() * 7.0;
    auto u = enumerate_image_ball(Mat::Identity(k, k), M);
    auto v = enumerate_frequencies(M, k);
    CHECK(u.size() == v.size());
  }

  Mat D(2, 2);
  D << 2, 0, 0, 1;
  auto got = enumerate_image_ball(D, 2);
  // oracle: brute force over ||m|| <= 4
  std::set<std::pair<int, int>> expect;
  for (int m1 = -4; m1 <= 4; ++m1)
    for (int m2 = -4; m2 <= 4; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      if (std::abs(2 * m1) <= 2 && std::abs(m2) <= 2) expect.insert({m1, m2});
    }
  std::set<std::pair<int, int>> have;
  for (const auto& m : got) have.insert({m[0], m[1]});
  CHECK(have == expect);

  CHECK(enumerate_image_ball(Mat::Identity(3, 3), 2).size() == 124);

  Mat sing = Mat::Zero(2, 2);
  CHECK_THROWS(enumerate_image_ball(sing, 2));
}

TEST_CASE("r_weight") {
  Basis std2(Mat::Identity(2, 2));
  IVec m(2);
  m << 3, -2;
  CHECK(r_weight(std2, m) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  m << 0, 5;
  CHECK(r_weight(std2, m) == doctest::Approx(1.0 / 5.0).epsilon(1e-15));

  Mat T(2, 2);
  T.col(0) << 1, 1;
  T.col(1) << 0, 1;
  m << 1, 1;
  CHECK(r_weight(Basis(T), m) == doctest::Approx(0.5).epsilon(1e-15));

  // symmetry and bound
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    IVec mm(2);
    mm << static_cast<int>(rng.below(21)) - 10, static_cast<int>(rng.below(21)) - 10;
    if (mm[0] == 0 && mm[1] == 0) continue;
    double w = r_weight(std2, mm);
    CHECK(w <= 1.0);
    CHECK(w == r_weight(std2, IVec(-mm)));
    CHECK(w == r_weight_standard(mm));
  }
}

TEST_CASE("box_membership on torus boxes") {
  Box b(vec2(0.2, 0.2), vec2(0.4, 0.4));
  CHECK(box_membership(b, vec2(1.3, -0.7)));
  CHECK_FALSE(box_membership(b, vec2(0.5, 0.3)));

  Parallelotope p(Mat::Identity(2, 2), vec2(0.1, 0.1), vec2(0.5, 0.5));
  CHECK(box_membership(p, vec2(0.55, 0.45)));
  CHECK_FALSE(box_membership(p, vec2(0.7, 0.45)));

  Box wide(vec2(0, 0), vec2(1.5, 0.5));
  CHECK_THROWS(box_membership(wide, vec2(0.1, 0.1)));
}

TEST_CASE("box_membership agrees with brute force") {
  Rng rng(17);
  Box b(vec2(0.15, 0.35), vec2(0.55, 0.8));
  auto brute = [&](const Vec& x) {
    for (int n1 = -3; n1 <= 3; ++n1)
      for (int n2 = -3; n2 <= 3; ++n2) {
        Vec y = x;
        y[0] += n1;
        y[1] += n2;
        if (b.contains_closed(y)) return true;
      }
    return false;
  };
  for (int t = 0; t < 1000; ++t) {
    Vec x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(box_membership(b, x) == brute(x));
  }

  Mat L(2, 2);
  L << 1.0, 0.3, -0.2, 0.9;
  Parallelotope p(L, vec2(0.2, 0.15), vec2(0.4, 0.6));
  auto brute_p = [&](const Vec& x) {
    Mat Li = L.inverse();
    for (int n1 = -3; n1 <= 3; ++n1)
      for (int n2 = -3; n2 <= 3; ++n2) {
        Vec y = x;
        y[0] += n1;
        y[1] += n2;
        Vec c = Li * (y - p.offset);
        if (std::abs(c[0]) <= p.b[0] && std::abs(c[1]) <= p.b[1]) return true;
      }
    return false;
  };
  for (int t = 0; t < 1000; ++t) {
    Vec x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(box_membership(p, x) == brute_p(x));
  }
}

TEST_CASE("injectivity checks") {
  CHECK_NOTHROW(check_torus_injective(Box(vec2(0, 0), vec2(0.9, 0.9))));
  CHECK_THROWS(check_torus_injective(Box(vec2(0, 0), vec2(1.0, 0.5))));
  // parallelotope with a lattice vector between vertices
  Parallelotope bad(Mat::Identity(2, 2), vec2(0.5, 0.25), vec2(0, 0));
  CHECK_THROWS(check_torus_injective(bad));
  Parallelotope good(Mat::Identity(2, 2), vec2(0.45, 0.25), vec2(0, 0));
  CHECK_NOTHROW(check_torus_injective(good));
}
