#include "apernet/selberg.hpp"

#include <boost/math/special_functions/trigamma.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace apernet {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

double sinc_pi(double x) {
  if (std::abs(x) < 1e-8) {
    double z = kPi * x;
    return 1.0 - z * z / 6.0;
  }
  return std::sin(kPi * x) / (kPi * x);
}

// cot(pi s) - 1/(pi s), analytic on (-1, 1)
double kappa(double s) {
  double z = kPi * s;
  if (std::abs(z) < 0.25) {
    double z2 = z * z;
    // cot z = 1/z - z/3 - z^3/45 - 2 z^5/945 - z^7/4725 - ...
    return -z * (1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 / 4725.0)));
  }
  return std::cos(z) / std::sin(z) - 1.0 / z;
}
}  // namespace

// H(x) = (sin(pi x)/pi)^2 (sum_n sgn(n)/(x-n)^2 + 2/x), written via trigamma:
// for x >= 0, H(x) = 1 - sinc^2(x)(1-2x) - 2 (sin(pi x)/pi)^2 trigamma(1+x).
double vaaler_H(double x) {
  if (x < 0.0) return -vaaler_H(-x);
  if (x == 0.0) return 0.0;
  double s = sinc_pi(x);
  double sp = std::sin(kPi * x) / kPi;
  return 1.0 - s * s * (1.0 - 2.0 * x) - 2.0 * sp * sp * boost::math::trigamma(1.0 + x);
}

double fejer_K(double x) {
  double s = sinc_pi(x);
  return s * s;
}

double beurling_major(double x) { return vaaler_H(x) + fejer_K(x); }
double beurling_minor(double x) { return vaaler_H(x) - fejer_K(x); }

SelbergPair::SelbergPair(double half_width, int degree) : w_(half_width), M_(degree) {
  if (!(half_width > 0.0)) throw std::invalid_argument("SelbergPair: half width must be > 0");
  if (degree < 1) throw std::invalid_argument("SelbergPair: degree must be >= 1");
}

SelbergPair build_selberg_pair(double half_width, int degree) {
  return SelbergPair(half_width, degree);
}

double SelbergPair::majorant(double x) const {
  return 0.5 * (beurling_major(M_ * (x + w_)) + beurling_major(M_ * (w_ - x)));
}

double SelbergPair::minorant(double x) const {
  return 0.5 * (beurling_minor(M_ * (x + w_)) + beurling_minor(M_ * (w_ - x)));
}

// hat C(xi) = sin(2 pi xi w)/(pi xi)
//           + (1-|s|)/M [cos(2 pi xi w) + kappa(s) sin(2 pi xi w)],  s = xi/M,
// for 0 < |xi| < M; the minorant flips the sign of the cosine block.
double SelbergPair::majorant_hat(double xi) const {
  double a = std::abs(xi);
  if (a >= static_cast<double>(M_)) return 0.0;
  if (a == 0.0) return 2.0 * w_ + 1.0 / M_;
  double s = xi / M_;
  double chih = std::sin(kTwoPi * xi * w_) / (kPi * xi);
  double c = std::cos(kTwoPi * xi * w_);
  double sn = std::sin(kTwoPi * xi * w_);
  return chih + (1.0 - std::abs(s)) / M_ * (c + kappa(s) * sn);
}

double SelbergPair::minorant_hat(double xi) const {
  double a = std::abs(xi);
  if (a >= static_cast<double>(M_)) return 0.0;
  if (a == 0.0) return 2.0 * w_ - 1.0 / M_;
  double s = xi / M_;
  double chih = std::sin(kTwoPi * xi * w_) / (kPi * xi);
  double c = std::cos(kTwoPi * xi * w_);
  double sn = std::sin(kTwoPi * xi * w_);
  return chih - (1.0 - std::abs(s)) / M_ * (c - kappa(s) * sn);
}

double majorant_G(const Vec& half_widths, int M, const Vec& x) {
  if (half_widths.size() != x.size()) throw std::invalid_argument("majorant_G: size mismatch");
  double g = 1.0;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    g *= SelbergPair(half_widths[j], M).majorant(x[j]);
  return g;
}

double minorant_g(const Vec& half_widths, int M, const Vec& x) {
  if (half_widths.size() != x.size()) throw std::invalid_argument("minorant_g: size mismatch");
  Eigen::Index k = x.size();
  Vec C(k), c(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    SelbergPair p(half_widths[j], M);
    C[j] = p.majorant(x[j]);
    c[j] = p.minorant(x[j]);
  }
  double G = C.prod();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    double term = c[i];
    for (Eigen::Index j = 0; j < k; ++j)
      if (j != i) term *= C[j];
    sum += term;
  }
  return -(static_cast<double>(k) - 1.0) * G + sum;
}

std::complex<double> TrigPolynomial::coefficient(const IVec& m) const {
  auto lex_less = [](const IVec& a, const IVec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  };
  auto it = std::lower_bound(coeffs.begin(), coeffs.end(), m,
                             [&](const auto& cm, const IVec& key) { return lex_less(cm.first, key); });
  if (it != coeffs.end() && it->first == m) return it->second;
  return {0.0, 0.0};
}

double TrigPolynomial::l1_mass() const {
  double s = 0.0;
  for (const auto& [m, c] : coeffs) s += std::abs(c);
  return s;
}

nlohmann::json TrigPolynomial::to_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = "trig_polynomial";
  j["k"] = k;
  j["M"] = M;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < L.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < L.cols(); ++c) row.push_back(L(r, c));
    rows.push_back(row);
  }
  j["L"] = rows;
  j["offset"] = std::vector<double>(offset.data(), offset.data() + offset.size());
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& [m, c] : coeffs) {
    nlohmann::json e;
    e["m"] = std::vector<int>(m.data(), m.data() + m.size());
    e["re"] = c.real();
    e["im"] = c.imag();
    cs.push_back(e);
  }
  j["coeffs"] = cs;
  return j;
}

TrigPolynomial TrigPolynomial::from_json(const nlohmann::json& j) {
  TrigPolynomial p;
  p.k = j.at("k").get<int>();
  p.M = j.at("M").get<int>();
  const auto& rows = j.at("L");
  p.L = Mat(p.k, p.k);
  for (int r = 0; r < p.k; ++r)
    for (int c = 0; c < p.k; ++c) p.L(r, c) = rows.at(r).at(c).get<double>();
  auto off = j.at("offset").get<std::vector<double>>();
  p.offset = Eigen::Map<const Vec>(off.data(), static_cast<Eigen::Index>(off.size()));
  for (const auto& e : j.at("coeffs")) {
    auto mv = e.at("m").get<std::vector<int>>();
    IVec m = Eigen::Map<const IVec>(mv.data(), static_cast<Eigen::Index>(mv.size()));
    p.coeffs.emplace_back(m, std::complex<double>(e.at("re").get<double>(), e.at("im").get<double>()));
  }
  return p;
}

std::pair<TrigPolynomial, TrigPolynomial> build_trig_pair(const Parallelotope& U, int M) {
  if (M < 1) throw std::invalid_argument("build_trig_pair: M >= 1 required");
  check_torus_injective(U);
  int k = U.k();
  double det = U.abs_det();
  std::vector<SelbergPair> pairs;
  pairs.reserve(k);
  for (int i = 0; i < k; ++i) pairs.emplace_back(U.b[i], M);

  auto support = enumerate_image_ball(U.L, static_cast<double>(M));
  {
    IVec zero = IVec::Zero(k);
    auto lex_less = [](const IVec& a, const IVec& b) {
      for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
      return false;
    };
    auto it = std::lower_bound(support.begin(), support.end(), zero, lex_less);
    support.insert(it, zero);
  }

  TrigPolynomial maj, min_;
  maj.k = min_.k = k;
  maj.L = min_.L = U.L;
  maj.M = min_.M = M;
  maj.offset = min_.offset = U.offset;
  Mat Lt = U.L.transpose();

  for (const auto& m : support) {
    Vec dots = Lt * m.cast<double>();  // dots[i] = t_i . m
    Vec Chat(k), chat(k);
    for (int i = 0; i < k; ++i) {
      Chat[i] = pairs[i].majorant_hat(dots[i]);
      chat[i] = pairs[i].minorant_hat(dots[i]);
    }
    double prodC = Chat.prod();
    double psi = det * prodC;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      double term = chat[i];
      for (int j = 0; j < k; ++j)
        if (j != i) term *= Chat[j];
      sum += term;
    }
    double phi = det * (-(static_cast<double>(k) - 1.0) * prodC + sum);

    // offsets enter as a modulation of the centered pair
    double ph = -m.cast<double>().dot(U.offset);
    std::complex<double> mod(std::cos(kTwoPi * ph), std::sin(kTwoPi * ph));
    if (psi != 0.0) maj.coeffs.emplace_back(m, psi * mod);
    if (phi != 0.0) min_.coeffs.emplace_back(m, phi * mod);
  }
  return {maj, min_};
}

namespace {

struct Grouped {
  // coefficient list split by the leading k-1 coordinates
  struct Group {
    Vec prefix;  // as doubles, length k-1
    std::size_t begin, end;
  };
  std::vector<Group> groups;
  std::vector<int> last;  // m_{k-1} per coefficient
  std::vector<std::complex<double>> c;
  int lmin = 0, lmax = 0;
};

Grouped group_coeffs(const TrigPolynomial& p) {
  Grouped g;
  g.last.reserve(p.coeffs.size());
  g.c.reserve(p.coeffs.size());
  int k = p.k;
  std::size_t i = 0;
  while (i < p.coeffs.size()) {
    std::size_t b = i;
    const IVec& head = p.coeffs[b].first;
    while (i < p.coeffs.size()) {
      const IVec& m = p.coeffs[i].first;
      bool same = true;
      for (int t = 0; t < k - 1; ++t)
        if (m[t] != head[t]) {
          same = false;
          break;
        }
      if (!same) break;
      g.last.push_back(m[k - 1]);
      g.c.push_back(p.coeffs[i].second);
      g.lmin = std::min(g.lmin, m[k - 1]);
      g.lmax = std::max(g.lmax, m[k - 1]);
      ++i;
    }
    Vec pre(k - 1);
    for (int t = 0; t < k - 1; ++t) pre[t] = static_cast<double>(head[t]);
    g.groups.push_back({pre, b, i});
  }
  return g;
}

std::complex<double> unit_phase(double turns) {
  double f = turns - std::floor(turns);
  return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

}  // namespace

double eval_trig(const TrigPolynomial& p, const Vec& x) {
  if (x.size() != p.k) throw std::invalid_argument("eval_trig: dimension mismatch");
  std::complex<double> acc(0.0, 0.0);
  for (const auto& [m, c] : p.coeffs) acc += c * unit_phase(m.cast<double>().dot(x));
  double tol = 1e-9 * std::max(1.0, p.l1_mass());
  if (std::abs(acc.imag()) > tol)
    throw std::runtime_error("eval_trig: imaginary residue exceeds tolerance (conjugate symmetry broken)");
  return acc.real();
}

std::vector<double> eval_trig_many(const TrigPolynomial& p, const std::vector<Vec>& xs) {
  Grouped g = group_coeffs(p);
  double tol = 1e-9 * std::max(1.0, p.l1_mass());
  std::vector<double> out(xs.size());
  std::vector<std::complex<double>> table(static_cast<std::size_t>(g.lmax - g.lmin + 1));
  for (std::size_t pi = 0; pi < xs.size(); ++pi) {
    const Vec& x = xs[pi];
    double xl = x[p.k - 1];
    for (int j = g.lmin; j <= g.lmax; ++j)
      table[static_cast<std::size_t>(j - g.lmin)] = unit_phase(static_cast<double>(j) * xl);
    std::complex<double> acc(0.0, 0.0);
    for (const auto& grp : g.groups) {
      double turns = 0.0;
      for (int t = 0; t < p.k - 1; ++t) turns += grp.prefix[t] * x[t];
      std::complex<double> base = unit_phase(turns);
      std::complex<double> part(0.0, 0.0);
      for (std::size_t i = grp.begin; i < grp.end; ++i)
        part += g.c[i] * table[static_cast<std::size_t>(g.last[i] - g.lmin)];
      acc += base * part;
    }
    if (std::abs(acc.imag()) > tol)
      throw std::runtime_error("eval_trig_many: imaginary residue exceeds tolerance");
    out[pi] = acc.real();
  }
  return out;
}

double periodized_majorant(const Parallelotope& U, int M, const Vec& x, long N) {
  int k = U.k();
  Mat Linv = U.L.inverse();
  Vec base = x - U.offset;
  double acc = 0.0;
  std::vector<long> n(k, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == k) {
      Vec y(k);
      for (int i = 0; i < k; ++i) y[i] = base[i] + static_cast<double>(n[i]);
      Vec c = Linv * y;
      acc += majorant_G(U.b, M, c);
      return;
    }
    for (long v = -N; v <= N; ++v) {
      n[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
  return acc;
}

long periodization_radius(const Parallelotope& U, int M, const Vec& x, double tol) {
  long N = static_cast<long>(std::ceil(sup_operator_norm(U.L) * (U.bmax() + 1.0))) + 2;
  double prev = periodized_majorant(U, M, x, N);
  for (int iter = 0; iter < 12; ++iter) {
    long N2 = 2 * N;
    double cur = periodized_majorant(U, M, x, N2);
    if (std::abs(cur - prev) < 0.25 * tol) return N2;
    prev = cur;
    N = N2;
  }
  return N;
}

}  // namespace apernet
