// apernet command-line driver: reproducible experiments over JSON configs.
// Exit codes: 0 success, 1 runtime failure, 2 bad configuration.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "apernet/bdmatch.hpp"
#include "apernet/correlation.hpp"
#include "apernet/diophantine.hpp"
#include "apernet/equidist.hpp"
#include "apernet/geometry.hpp"
#include "apernet/netgen.hpp"
#include "apernet/parallel.hpp"
#include "apernet/pointset_io.hpp"
#include "apernet/rng.hpp"
#include "apernet/selberg.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using nlohmann::json;
using namespace apernet;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

Vec parse_vec(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty number array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

// list of vectors -> matrix with those vectors as columns
Mat parse_columns(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a list of vectors");
  Vec first = parse_vec(j.at(0));
  Mat m(first.size(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    Vec col = parse_vec(j.at(c));
    if (col.size() != first.size()) throw ConfigError("vector list has mixed dimensions");
    m.col(static_cast<Eigen::Index>(c)) = col;
  }
  return m;
}

Box parse_box(const json& j) {
  if (!j.contains("lo") || !j.contains("hi")) throw ConfigError("box needs lo and hi");
  try {
    return Box(parse_vec(j.at("lo")), parse_vec(j.at("hi")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad box: ") + e.what());
  }
}

FlowSpec parse_flow(const json& j) {
  if (!j.contains("vectors")) throw ConfigError("flow needs vectors");
  Mat A = parse_columns(j.at("vectors"));
  Vec x = j.contains("base_point") ? parse_vec(j.at("base_point")) : Vec(Vec::Zero(A.rows()));
  try {
    return FlowSpec(A, x);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad flow: ") + e.what());
  }
}

Section parse_section(const json& j) {
  if (!j.contains("plane")) throw ConfigError("section needs a plane basis");
  Mat W = parse_columns(j.at("plane"));
  Vec anchor = j.contains("anchor") ? parse_vec(j.at("anchor")) : Vec(Vec::Zero(W.rows()));
  std::vector<Box> boxes;
  if (j.contains("boxes"))
    for (const auto& b : j.at("boxes")) boxes.push_back(parse_box(b));
  try {
    return Section(W, anchor, boxes);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad section: ") + e.what());
  }
}

TorusTarget parse_target(const json& j) {
  if (j.contains("box")) return parse_box(j.at("box"));
  if (j.contains("parallelotope")) {
    const json& p = j.at("parallelotope");
    try {
      Mat L = parse_columns(p.at("L"));
      Vec b = parse_vec(p.at("b"));
      Vec off = p.contains("offset") ? parse_vec(p.at("offset")) : Vec(Vec::Zero(L.rows()));
      return Parallelotope(L, b, off);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("bad parallelotope: ") + e.what());
    }
  }
  throw ConfigError("target needs box or parallelotope");
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

json result_header(const json& config, std::uint64_t seed) {
  json j;
  j["format_version"] = 1;
  j["seed"] = seed;
  j["config"] = config;
  return j;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_gen(const json& cfg) {
  std::string generator = cfg.value("generator", "visit_set");
  std::string out = cfg.value("out", "pointset.txt");
  PointSet ps;
  if (generator == "visit_set") {
    FlowSpec flow = parse_flow(cfg.at("flow"));
    Section section = parse_section(cfg.at("section"));
    Box window = parse_box(cfg.at("window"));
    ps = visit_set(flow, section, window);
    ps.meta = {{"config", cfg}, {"density", visit_density(flow, section)}};
  } else if (generator == "cut_and_project") {
    Mat L = parse_columns(cfg.at("lattice_basis"));
    Mat Vb = parse_columns(cfg.at("v_basis"));
    Mat Wb = parse_columns(cfg.at("w_basis"));
    std::vector<Box> K;
    const json& kj = cfg.at("window_K");
    if (kj.is_array())
      for (const auto& b : kj) K.push_back(parse_box(b));
    else
      K.push_back(parse_box(kj));
    Box phys = parse_box(cfg.at("phys_window"));
    ps = cut_and_project(L, Vb, Wb, K, phys);
    ps.meta = {{"config", cfg}};
  } else {
    throw ConfigError("unknown generator: " + generator);
  }
  write_pointset_file(out, ps);
  std::cout << "wrote " << ps.pts.size() << " points to " << out << "\n";
  return 0;
}

int cmd_discrepancy(const json& cfg, std::uint64_t seed) {
  FlowSpec flow = parse_flow(cfg.at("flow"));
  if (!cfg.contains("target")) throw ConfigError("discrepancy: target required");
  TorusTarget target = parse_target(cfg.at("target"));
  if (!cfg.contains("T_list")) throw ConfigError("discrepancy: T_list required");
  std::vector<double> T_list = cfg.at("T_list").get<std::vector<double>>();
  MRule rule;
  if (cfg.contains("m_rule")) {
    const json& mr = cfg.at("m_rule");
    if (mr.is_string()) {
      // "T^d" selects M = floor(T^d); "T^0.5" etc. also accepted
      std::string s = mr.get<std::string>();
      if (s == "T^d") {
        rule.exponent = static_cast<double>(flow.d());
      } else if (s.rfind("T^", 0) == 0) {
        try {
          rule.exponent = std::stod(s.substr(2));
        } catch (...) {
          throw ConfigError("m_rule: cannot parse " + s);
        }
      } else {
        throw ConfigError("m_rule: unknown rule " + s);
      }
    } else if (mr.contains("exponent")) {
      rule.exponent = mr.at("exponent").get<double>();
    } else {
      throw ConfigError("m_rule needs exponent");
    }
  } else {
    rule.exponent = 1.0 / (flow.d() + 2.0);
  }

  auto rep = discrepancy_scan(flow, target, T_list, rule, seed);

  std::string out_csv = cfg.value("out_csv", "discrepancy.csv");
  std::ofstream csv(out_csv);
  if (!csv) throw std::runtime_error("cannot open " + out_csv);
  csv << "T,N_T,volume_term,abs_diff,bound_leading,bound_sum\n";
  for (const auto& r : rep.rows)
    csv << fmt12(r.T) << ',' << fmt12(r.NT) << ',' << fmt12(r.volume_term) << ','
        << fmt12(r.abs_diff) << ',' << fmt12(r.bound_leading) << ',' << fmt12(r.bound_sum)
        << "\n";

  json out = result_header(cfg, seed);
  out["rows"] = rep.rows.size();
  out["degenerate"] = rep.degenerate;
  if (!rep.degenerate) {
    out["fitted_slope"] = rep.slope.slope;
    out["slope_stderr"] = rep.slope.slope_stderr;
  }
  out["m_exponent"] = rule.exponent;
  write_json_file(cfg.value("out_json", "discrepancy.json"), out);
  std::cout << "scan of " << rep.rows.size() << " T values"
            << (rep.degenerate ? " (degenerate fit)" : "") << "\n";
  return 0;
}

int cmd_selberg(const json& cfg, std::uint64_t seed) {
  std::string mode = cfg.value("mode", "sandwich");
  if (mode == "export-pair") {
    TorusTarget t = parse_target(cfg.at("target"));
    if (!std::holds_alternative<Parallelotope>(t)) {
      Box b = std::get<Box>(t);
      t = box_as_parallelotope(b);
    }
    int M = cfg.value("M", 8);
    auto [psi, phi] = build_trig_pair(std::get<Parallelotope>(t), M);
    json out = result_header(cfg, seed);
    out["majorant"] = psi.to_json();
    out["minorant"] = phi.to_json();
    write_json_file(cfg.value("out", "selberg_pair.json"), out);
    return 0;
  }
  if (mode != "sandwich") throw ConfigError("selberg: unknown mode " + mode);

  int k = cfg.value("k", 2);
  int count = cfg.value("count", 10);
  int samples = cfg.value("samples", 10000);
  std::vector<int> M_list = cfg.value("M_list", std::vector<int>{4, 8, 16});
  Rng rng(seed);
  double worst_major = 0.0, worst_minor = 0.0, worst_coeff_slack = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    Mat L = Mat::Identity(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) L(i, j) += rng.uniform(-0.2, 0.2);
    Vec b(k), off(k);
    for (int i = 0; i < k; ++i) {
      b[i] = rng.uniform(0.05, 0.4);
      off[i] = rng.uniform(0.0, 1.0);
    }
    Parallelotope U(L, b, off);
    int M = M_list[static_cast<std::size_t>(trial) % M_list.size()];
    auto [psi, phi] = build_trig_pair(U, M);
    std::vector<Vec> xs;
    xs.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
      Vec x(k);
      for (int i = 0; i < k; ++i) x[i] = rng.uniform();
      xs.push_back(x);
    }
    auto up = eval_trig_many(psi, xs);
    auto lo = eval_trig_many(phi, xs);
    for (int s = 0; s < samples; ++s) {
      double chi = box_membership(U, xs[static_cast<std::size_t>(s)]) ? 1.0 : 0.0;
      worst_major = std::max(worst_major, chi - up[static_cast<std::size_t>(s)]);
      worst_minor = std::max(worst_minor, lo[static_cast<std::size_t>(s)] - chi);
    }
    double front = k * std::pow(2.0, k + 1) * std::pow(1.0 + 2.0 * U.bmax(), k) * U.abs_det();
    Basis T(L);
    for (const auto* poly : {&psi, &phi})
      for (const auto& [m, c] : poly->coeffs) {
        if (m.isZero()) continue;
        worst_coeff_slack = std::max(worst_coeff_slack, std::abs(c) - front * r_weight(T, m));
      }
  }
  json out = result_header(cfg, seed);
  out["trials"] = count;
  out["samples_per_trial"] = samples;
  out["max_majorant_violation"] = worst_major;
  out["max_minorant_violation"] = worst_minor;
  out["max_coeff_bound_slack"] = worst_coeff_slack;
  out["pass"] = worst_major <= 1e-8 && worst_minor <= 1e-8 && worst_coeff_slack <= 1e-12;
  write_json_file(cfg.value("out", "selberg_check.json"), out);
  std::cout << "sandwich max violations: majorant " << worst_major << ", minorant " << worst_minor
            << "\n";
  return 0;
}

int cmd_et_bound(const json& cfg, std::uint64_t seed) {
  FlowSpec flow = parse_flow(cfg.at("flow"));
  TorusTarget target = parse_target(cfg.at("target"));
  double T = cfg.at("T").get<double>();
  double M = cfg.at("M").get<double>();
  EtBound b = std::holds_alternative<Box>(target)
                  ? erdos_turan_bound(std::get<Box>(target), flow, T, M)
                  : nt_estimate_bound(std::get<Parallelotope>(target), flow, T, M);
  json out = result_header(cfg, seed);
  out["leading"] = b.leading;
  out["sum_term"] = b.sum_term;
  out["total"] = b.total();
  if (cfg.value("measure", false)) {
    double NT = flow.d() == 1 && std::holds_alternative<Box>(target)
                    ? birkhoff_exact_1d({flow, target, T})
                    : birkhoff_estimate({flow, target, T}, seed).value;
    double vol = target_volume(target) * std::pow(2.0 * T, flow.d());
    out["N_T"] = NT;
    out["volume_term"] = vol;
    out["abs_diff"] = std::abs(NT - vol);
  }
  write_json_file(cfg.value("out", "et_bound.json"), out);
  return 0;
}

int cmd_dioph(const json& cfg, std::uint64_t seed) {
  std::string mode = cfg.value("mode", "sum");
  std::vector<double> M_list = cfg.value("M_list", std::vector<double>{16, 32, 64, 128});
  bool allow_large = cfg.value("allow_large", false);
  json out = result_header(cfg, seed);
  std::string out_csv = cfg.value("out_csv", "dioph.csv");
  std::ofstream csv(out_csv);
  if (!csv) throw std::runtime_error("cannot open " + out_csv);
  csv << "M,sum,min_inner_product,argmin\n";

  auto argmin_str = [](const IVec& m) {
    std::string s;
    for (Eigen::Index i = 0; i < m.size(); ++i) s += (i ? ";" : "") + std::to_string(m[i]);
    return s;
  };

  if (mode == "profile") {
    Vec v = parse_vec(cfg.at("v"));
    auto prof = dioph_profile(v, M_list);
    for (const auto& r : prof.rows)
      csv << fmt12(r.M) << ",," << fmt12(r.min_abs) << ',' << argmin_str(r.argmin) << "\n";
    out["s_est"] = prof.s_est;
    out["resonant"] = [&] {
      for (const auto& r : prof.rows)
        if (r.resonant) return true;
      return false;
    }();
  } else if (mode == "sum") {
    Mat vs = parse_columns(cfg.at("vs"));
    int k = static_cast<int>(vs.rows()), d = static_cast<int>(vs.cols());
    Mat Tm;
    if (cfg.contains("basis")) {
      Tm = parse_columns(cfg.at("basis"));
    } else {
      // complete with standard vectors, greedily keeping the determinant away
      // from zero
      Tm = Mat(k, k);
      Tm.leftCols(d) = vs;
      std::vector<int> used;
      for (int c = d; c < k; ++c) {
        int best = -1;
        double best_det = 0.0;
        for (int e = 0; e < k; ++e) {
          if (std::find(used.begin(), used.end(), e) != used.end()) continue;
          Tm.col(c) = Vec::Unit(k, e);
          Mat sub = Tm.leftCols(c + 1);
          double q = std::sqrt(std::abs((sub.transpose() * sub).determinant()));
          if (q > best_det) {
            best_det = q;
            best = e;
          }
        }
        used.push_back(best);
        Tm.col(c) = Vec::Unit(k, best);
      }
    }
    Basis T(Tm);
    std::vector<std::pair<double, double>> sums;
    json excluded = json::array();
    for (double M : M_list) {
      auto r = strongly_dioph_sum_excluding(vs, T, M, allow_large);
      if (!r.excluded.empty())
        for (const auto& w : r.excluded) {
          excluded.push_back(argmin_str(w));
        }
      sums.emplace_back(M, r.sum);
      // closest approach among the flow vectors at this M
      double best = HUGE_VAL;
      IVec arg;
      for (int i = 0; i < d; ++i) {
        auto prof = dioph_profile(vs.col(i), {M});
        if (prof.rows[0].min_abs < best) {
          best = prof.rows[0].min_abs;
          arg = prof.rows[0].argmin;
        }
      }
      csv << fmt12(M) << ',' << fmt12(r.sum) << ',' << fmt12(best) << ',' << argmin_str(arg)
          << "\n";
    }
    if (!excluded.empty()) {
      out["excluded_resonances"] = excluded;
      std::cerr << "warning: resonant frequencies excluded from the sum\n";
    }
    if (sums.size() >= 4) {
      auto fit = growth_fit(sums, k, d);
      out["eps_est"] = fit.eps_est;
      out["log_trend"] = fit.log_trend;
      out["trend_non_increasing"] = fit.trend_non_increasing;
    }
  } else {
    throw ConfigError("dioph: unknown mode " + mode);
  }
  write_json_file(cfg.value("out_json", "dioph.json"), out);
  return 0;
}

int cmd_match(const json& cfg, std::uint64_t seed) {
  PointSet Y = read_pointset_file(cfg.at("points").get<std::string>());
  Mat lattice = parse_columns(cfg.at("lattice"));
  double lambda = cfg.at("lambda").get<double>();
  Box window = parse_box(cfg.at("window"));
  std::string mode = cfg.value("mode", "match");
  json out = result_header(cfg, seed);
  if (mode == "match") {
    double rho = cfg.at("rho").get<double>();
    auto inst = build_instance(Y, lattice, lambda, window, rho);
    auto res = max_matching(inst);
    json pairs = json::array();
    for (auto [a, b] : res.pairs) pairs.push_back({a, b});
    out["pairs"] = pairs;
    out["deficiency"] = res.deficiency;
    out["max_displacement"] = res.max_displacement;
    out["core_count"] = inst.core_a.size();
    std::cout << "deficiency " << res.deficiency << ", max displacement "
              << res.max_displacement << "\n";
  } else if (mode == "min-radius") {
    double rho_max = cfg.at("rho_max").get<double>();
    auto r = min_bd_radius(Y, lattice, lambda, window, rho_max);
    if (r) {
      out["min_bd_radius"] = *r;
      std::cout << "min radius " << *r << "\n";
    } else {
      out["min_bd_radius"] = nullptr;
      out["note"] = "exceeds rho_max";
      std::cout << "no perfect matching up to rho_max\n";
    }
  } else {
    throw ConfigError("match: unknown mode " + mode);
  }
  write_json_file(cfg.value("out", "match.json"), out);
  return 0;
}

int cmd_correlate(const json& cfg, std::uint64_t seed) {
  Eigen::MatrixXi B;
  {
    const json& qb = cfg.at("q_basis");
    Vec first = parse_vec(qb.at(0));
    B.resize(first.size(), static_cast<Eigen::Index>(qb.size()));
    for (std::size_t c = 0; c < qb.size(); ++c) {
      Vec col = parse_vec(qb.at(c));
      for (Eigen::Index i = 0; i < col.size(); ++i) {
        double r = std::round(col[i]);
        if (std::abs(col[i] - r) > 1e-9) throw ConfigError("q_basis must be integral");
        B(i, static_cast<Eigen::Index>(c)) = static_cast<int>(r);
      }
    }
  }
  RationalSubspace Q = make_rational_subspace(B);
  Section S = parse_section(cfg.at("section"));
  int samples = cfg.value("samples", 256);
  double lambda = cfg.value("lambda", 1.0);
  std::vector<long> dilations = cfg.value("dilations", std::vector<long>{1, 2, 4, 8});

  json out = result_header(cfg, seed);
  json qb = json::array();
  for (int c = 0; c < Q.d(); ++c) {
    json col = json::array();
    for (int i = 0; i < Q.k(); ++i) col.push_back(Q.basis(i, c));
    qb.push_back(col);
  }
  out["q_basis_primitive"] = qb;

  auto witness = not_correlated_test(Q, S, samples, seed);
  if (witness) {
    out["witness"] = {
        {"x1", std::vector<double>(witness->x1.data(), witness->x1.data() + witness->x1.size())},
        {"x2", std::vector<double>(witness->x2.data(), witness->x2.data() + witness->x2.size())},
        {"count1", witness->count1},
        {"count2", witness->count2}};
  } else {
    out["witness"] = nullptr;
  }

  Vec x;
  if (cfg.contains("x"))
    x = parse_vec(cfg.at("x"));
  else if (witness)
    x = witness->count1 != 0 ? witness->x1 : witness->x2;
  if (x.size()) {
    json table = json::array();
    for (long N : dilations)
      table.push_back({{"N", N}, {"ratio", dilated_domain_discrepancy(Q, S, x, lambda, N)}});
    out["dilation_ratios"] = table;
    out["counts_at_x"] = orbit_section_count(Q, x, S).open_count;
  }
  write_json_file(cfg.value("out", "correlate.json"), out);
  std::cout << (witness ? "witness found" : "no witness") << "\n";
  return 0;
}

int cmd_report(const json& cfg, std::uint64_t seed) {
  PointSet Y = read_pointset_file(cfg.at("points").get<std::string>());
  json out = result_header(cfg, seed);
  out["count"] = Y.pts.size();
  out["generator"] = Y.generator;
  double lambda = cfg.contains("lambda") ? cfg.at("lambda").get<double>()
                  : Y.meta.contains("density") ? Y.meta.at("density").get<double>()
                                               : 0.0;
  if (lambda <= 0) throw ConfigError("report: lambda required (not present in point file)");
  out["lambda"] = lambda;
  if (Y.pts.size() >= 2) {
    auto [r, R] = separation_covering(Y);
    out["separation"] = r;
    out["covering"] = R;
  }
  std::vector<long> rho_list = cfg.value("rho_list", std::vector<long>{1, 2, 4, 8, 16});
  json dys = json::array();
  for (long rho : rho_list) {
    dys.push_back({{"rho", rho}, {"D_Y", dy_sup(Y, rho, lambda, Y.window)}});
  }
  out["dy_sup"] = dys;
  out["window_discrepancy"] = discrete_discrepancy(Y, Y.window, lambda);
  write_json_file(cfg.value("out", "report.json"), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separated nets from linear toral flows: generation, bounds, matching"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed_override, "override config seed");
    sub->add_option("--threads", threads, "worker count (default APERNET_THREADS)");
  };

  auto* gen = app.add_subcommand("gen", "generate a point set");
  auto* disc = app.add_subcommand("discrepancy", "Birkhoff discrepancy scan with bounds");
  auto* selb = app.add_subcommand("selberg", "majorant/minorant checks and export");
  auto* etb = app.add_subcommand("et-bound", "evaluate the truncation + sum bound");
  auto* dio = app.add_subcommand("dioph", "Diophantine profiles and weighted sums");
  auto* mat = app.add_subcommand("match", "bounded-displacement matching");
  auto* corr = app.add_subcommand("correlate", "rational-orbit section statistics");
  auto* repo = app.add_subcommand("report", "summarize a point-set file");
  for (auto* s : {gen, disc, selb, etb, dio, mat, corr, repo}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  json cfg;
  std::uint64_t seed = 0;
  try {
    cfg = load_config(config_path);
    if (!cfg.is_object()) throw ConfigError("config root must be an object");
    seed = seed_override ? *seed_override : cfg.value("seed", std::uint64_t{0});
    cfg["seed"] = seed;
    if (threads)
      set_thread_count(*threads);
    else if (cfg.contains("threads"))
      set_thread_count(cfg.at("threads").get<int>());
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(cfg);
    if (disc->parsed()) return cmd_discrepancy(cfg, seed);
    if (selb->parsed()) return cmd_selberg(cfg, seed);
    if (etb->parsed()) return cmd_et_bound(cfg, seed);
    if (dio->parsed()) return cmd_dioph(cfg, seed);
    if (mat->parsed()) return cmd_match(cfg, seed);
    if (corr->parsed()) return cmd_correlate(cfg, seed);
    if (repo->parsed()) return cmd_report(cfg, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
