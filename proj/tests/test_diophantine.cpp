#include <doctest.h>

#include "apernet/diophantine.hpp"
#include "apernet/rng.hpp"

#include <cmath>

using namespace apernet;

namespace {
const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("dioph_profile on the golden vector") {
  Vec v = vec2(1.0, kPhi);
  auto prof = dioph_profile(v, {4, 8, 16, 32, 64, 128, 256});
  REQUIRE(prof.rows.size() == 7);
  // minima are non-increasing and realized at Fibonacci pairs
  for (std::size_t i = 1; i < prof.rows.size(); ++i)
    CHECK(prof.rows[i].min_abs <= prof.rows[i - 1].min_abs);
  for (const auto& r : prof.rows) {
    CHECK_FALSE(r.resonant);
    long a = std::abs(r.argmin[0]), b = std::abs(r.argmin[1]);
    // oracle: consecutive Fibonacci numbers (continued fraction convergents)
    long f0 = 1, f1 = 1;
    bool fib = false;
    while (f1 <= std::max(a, b) + 1) {
      if ((a == f1 && b == f0) || (a == f0 && b == f1)) fib = true;
      long f2 = f0 + f1;
      f0 = f1;
      f1 = f2;
    }
    CHECK_MESSAGE(fib, "argmin (", r.argmin[0], ",", r.argmin[1], ") not a Fibonacci pair");
    // badly approximable: min |m.v| * ||m|| stays bounded below
    CHECK(r.min_abs * static_cast<double>(std::max(a, b)) > 0.2);
  }
  CHECK(prof.s_est == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("dioph_profile flags rational resonances") {
  auto prof = dioph_profile(vec2(1.0, 0.5), {2, 4});
  CHECK(prof.rows[0].resonant);
  CHECK(prof.rows[0].min_abs == 0.0);
  CHECK(prof.rows[0].argmin[0] == 1);
  CHECK(prof.rows[0].argmin[1] == -2);

  auto prof2 = dioph_profile(vec2(1.0, 0.0), {1});
  CHECK(prof2.rows[0].resonant);
  CHECK(prof2.rows[0].argmin[0] == 0);
  CHECK(prof2.rows[0].argmin[1] == 1);
}

TEST_CASE("strongly_dioph_sum hand-checked degenerate case") {
  // k = d = 1, v = phi, standard basis, M = 3
  Mat vs(1, 1);
  vs << kPhi;
  Basis T(Mat::Identity(1, 1));
  double expect = 0.0;
  for (int m = 1; m <= 3; ++m)
    expect += 2.0 * std::min(1.0, 1.0 / m) / (m * kPhi);
  CHECK(strongly_dioph_sum(vs, T, 3) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("strongly_dioph_sum equals direct enumeration and is symmetric") {
  Rng rng(88);
  Mat vs(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) vs(i, j) = rng.uniform(-1, 1);
  Mat Tm = Mat::Identity(3, 3);
  Tm.col(0) = vs.col(0);
  Tm.col(1) = vs.col(1);
  Basis T(Tm);

  double fast = strongly_dioph_sum(vs, T, 8);

  // oracle: plain loop over the ball
  double slow = 0.0;
  for (const auto& m : enumerate_frequencies(8, 3)) {
    double w = r_weight(T, m);
    for (int i = 0; i < 2; ++i) w /= std::abs(vs.col(i).dot(m.cast<double>().eval()));
    slow += w;
  }
  CHECK(fast == doctest::Approx(slow).epsilon(1e-11));

  // half-space x 2 agrees with the full sum (m -> -m symmetry)
  double half = 0.0;
  for (const auto& m : enumerate_frequencies(8, 3)) {
    bool pos = false;
    for (int i = 0; i < 3; ++i) {
      if (m[i] != 0) {
        pos = m[i] > 0;
        break;
      }
    }
    if (!pos) continue;
    double w = r_weight(T, m);
    for (int i = 0; i < 2; ++i) w /= std::abs(vs.col(i).dot(m.cast<double>().eval()));
    half += w;
  }
  CHECK(2.0 * half == doctest::Approx(fast).epsilon(1e-11));

  // permutation invariance
  Mat swapped(3, 2);
  swapped.col(0) = vs.col(1);
  swapped.col(1) = vs.col(0);
  CHECK(strongly_dioph_sum(swapped, T, 8) == doctest::Approx(fast).epsilon(1e-12));

  // monotone in M
  CHECK(strongly_dioph_sum(vs, T, 16) >= fast);
}

TEST_CASE("near-resonance blows the sum up") {
  Mat good(2, 1), near(2, 1);
  good << 1.0, kPhi;
  near << 1.0, 0.5 + 1e-9;
  Basis T(Mat::Identity(2, 2));
  double g = strongly_dioph_sum(good, T, 4);
  double n = strongly_dioph_sum(near, T, 4);
  CHECK(n > 1000.0 * g);
}

TEST_CASE("exact resonance raises with witnesses") {
  Mat vs(2, 1);
  vs << 1.0, 0.5;
  Basis T(Mat::Identity(2, 2));
  CHECK_THROWS_AS(strongly_dioph_sum(vs, T, 4), ResonanceError);
  try {
    strongly_dioph_sum(vs, T, 4);
  } catch (const ResonanceError& e) {
    REQUIRE(!e.witnesses.empty());
    const IVec& w = e.witnesses.front();
    CHECK(std::abs(1.0 * w[0] + 0.5 * w[1]) < 1e-12);
  }
  auto ex = strongly_dioph_sum_excluding(vs, T, 4);
  CHECK(!ex.excluded.empty());
  CHECK(std::isfinite(ex.sum));
  CHECK(ex.sum > 0.0);
}

TEST_CASE("desk-scale caps") {
  Mat vs(2, 1);
  vs << 1.0, kPhi;
  Basis T(Mat::Identity(2, 2));
  CHECK_THROWS(strongly_dioph_sum(vs, T, 300));
  CHECK_NOTHROW(strongly_dioph_sum(vs, T, 300, true));
}

TEST_CASE("growth_fit") {
  std::vector<std::pair<double, double>> flat{{16, 5}, {32, 5}, {64, 5}, {128, 5}};
  auto f = growth_fit(flat, 3, 2);
  CHECK(f.eps_est == doctest::Approx(0.0));
  CHECK(f.trend_non_increasing);

  std::vector<std::pair<double, double>> linear{{16, 16}, {32, 32}, {64, 64}, {128, 128}};
  CHECK(growth_fit(linear, 3, 2).eps_est == doctest::Approx(1.0));

  CHECK_THROWS(growth_fit({{16, 1}, {32, 2}}, 3, 2));
}

TEST_CASE("seeded random pair in R^3 is strongly Diophantine numerically") {
  Rng rng(11);
  Mat vs(3, 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) vs(i, j) = rng.uniform(-1, 1);
  Mat Tm(3, 3);
  Tm.col(0) = vs.col(0);
  Tm.col(1) = vs.col(1);
  Tm.col(2) = Vec::Unit(3, 2);
  Basis T(Tm);
  std::vector<std::pair<double, double>> sums;
  for (double M : {16.0, 32.0, 64.0, 128.0}) sums.emplace_back(M, strongly_dioph_sum(vs, T, M));
  auto f = growth_fit(sums, 3, 2);
  CHECK(f.eps_est <= 0.3);
  CHECK(f.trend_non_increasing);
}

TEST_CASE("r-weight factorization for mixed bases") {
  // with standard vectors in positions d+1..k the r_T factors split into the
  // flow part and a standard part
  Rng rng(9);
  Mat Tm(3, 3);
  Tm.col(0) = Vec::Random(3);
  Tm.col(1) = Vec::Random(3);
  Tm.col(2) = Vec::Unit(3, 2);
  Basis T(Tm);
  for (int t = 0; t < 100; ++t) {
    IVec m(3);
    for (int i = 0; i < 3; ++i) m[i] = static_cast<int>(rng.below(17)) - 8;
    if (m.isZero()) continue;
    double direct = r_weight(T, m);
    double manual = 1.0;
    for (int i = 0; i < 2; ++i) {
      double dot = std::abs(Tm.col(i).dot(m.cast<double>().eval()));
      if (dot > 1.0) manual /= dot;
    }
    double m3 = std::abs(static_cast<double>(m[2]));
    if (m3 > 1.0) manual /= m3;
    CHECK(direct == doctest::Approx(manual).epsilon(1e-14));
  }
}

TEST_CASE("irrationality witness") {
  Mat V1(2, 1);
  V1 << 1.0, 0.0;  // span(e_1)
  auto w = irrationality_witness(V1, 1);
  REQUIRE(w.has_value());
  CHECK((*w)[0] == 0);
  CHECK((*w)[1] == 1);

  Mat V2(2, 1);
  V2 << 1.0, 2.0;  // rational direction
  auto w2 = irrationality_witness(V2, 4);
  REQUIRE(w2.has_value());
  CHECK((*w2)[0] == 2);
  CHECK((*w2)[1] == -1);

  Mat V3(2, 1);
  V3 << 1.0, kPhi;
  CHECK_FALSE(irrationality_witness(V3, 1000).has_value());
}
