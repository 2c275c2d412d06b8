// fconj: build and certify (approximate) conjugacies between Furstenberg
// transformations, run the obstruction analyzers, and emit JSON reports.
//
// Exit codes: 0 success, 2 obstruction detected (mathematically expected
// negative verdict), 64 malformed config, 1 internal/numerical error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torusconj/torusconj.hpp"

namespace {

using nlohmann::json;
using namespace torusconj;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitObstruction = 2;
constexpr int kExitBadConfig = 64;

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<double> eps;
  std::optional<std::int64_t> grid;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::string out;
};

json load_config(const Options& opt) {
  if (opt.config_path.empty()) return json::object();
  std::ifstream in(opt.config_path);
  if (!in) throw config_error("cannot open config file: " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config root must be a JSON object");
  return j;
}

// Flag overrides win over config values; whatever is resolved here is echoed
// back into the report so a rerun of the report's "config" reproduces it.
void apply_overrides(json& cfg, const Options& opt) {
  if (opt.eps) cfg["eps"] = *opt.eps;
  if (opt.grid) cfg["grid"] = *opt.grid;
  if (opt.samples) cfg["samples"] = *opt.samples;
  if (opt.seed) cfg["seed"] = *opt.seed;
  if (!opt.out.empty()) cfg["out"] = opt.out;
}

template <typename T>
T require(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw config_error("config is missing \"" + key + "\"");
  try {
    return cfg.at(key).get<T>();
  } catch (const std::exception& e) {
    throw config_error("config field \"" + key + "\" is malformed: " + e.what());
  }
}

template <typename T>
T value_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const std::exception& e) {
    throw config_error("config field \"" + key + "\" is malformed: " + e.what());
  }
}

FurstenbergMap parse_map(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw config_error("config is missing \"" + key + "\"");
  try {
    return cfg.at(key).get<FurstenbergMap>();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error("config field \"" + key + "\" is not a valid map: " + e.what());
  }
}

void write_report(const json& report, const std::string& out_path) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

void write_profile_csv(const std::vector<MeasureDefectSample>& profile,
                       const std::string& out_path) {
  if (out_path.empty() || out_path == "-") return;
  std::string csv_path = out_path;
  auto dot = csv_path.rfind('.');
  if (dot != std::string::npos && csv_path.find('/', dot) == std::string::npos)
    csv_path.resize(dot);
  csv_path += ".csv";
  std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open profile file: " + csv_path);
  out << "threshold,estimate,error_bound\n";
  char line[128];
  for (const auto& s : profile) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", s.threshold,
                  s.estimate, s.error_bound);
    out << line;
  }
}

int run_build(const std::string& mode, json cfg) {
  FurstenbergMap alpha = parse_map(cfg, "alpha");
  FurstenbergMap beta = parse_map(cfg, "beta");
  const std::string out = value_or<std::string>(cfg, "out", "");
  const auto grid = value_or<std::int64_t>(cfg, "grid", 512);

  json report;
  report["mode"] = mode;

  auto finish = [&](const ConjugacyResult& res) {
    report["result"] = res;
    DefectReport dr = sup_defect(res.map, alpha, beta, grid, res.defect_lipschitz);
    report["verification"] = dr;
    report["config"] = cfg;
    write_report(report, out);
    write_profile_csv(res.profile, out);
  };

  if (mode == "m2") {
    double eps = require<double>(cfg, "eps");
    cfg["grid"] = grid;
    finish(build_m2_conjugacy(alpha, beta, eps));
  } else if (mode == "m1") {
    double eps = require<double>(cfg, "eps");
    auto samples = value_or<std::int64_t>(cfg, "samples", 1000000);
    auto seed = value_or<std::uint64_t>(cfg, "seed", 0x5EED5EEDull);
    cfg["grid"] = grid;
    cfg["samples"] = samples;
    cfg["seed"] = seed;
    finish(build_m1_conjugacy(alpha, beta, eps, samples, seed));
  } else if (mode == "exact") {
    cfg["grid"] = grid;
    finish(build_exact_conjugacy(alpha, beta));
  } else if (mode == "kseq") {
    std::vector<double> schedule;
    if (cfg.contains("eps_schedule"))
      schedule = require<std::vector<double>>(cfg, "eps_schedule");
    else
      schedule = {require<double>(cfg, "eps")};
    cfg["eps_schedule"] = schedule;
    cfg["grid"] = grid;
    auto seq = build_k_conjugacy_sequence(alpha, beta, schedule);
    json stages = json::array();
    for (const auto& res : seq) {
      json s;
      s["result"] = res;
      s["verification"] = sup_defect(res.map, alpha, beta, grid, res.defect_lipschitz);
      stages.push_back(std::move(s));
    }
    report["stages"] = std::move(stages);
    report["config"] = cfg;
    write_report(report, out);
  } else {
    throw config_error("unknown build mode: " + mode +
                       " (expected m1, m2, exact, or kseq)");
  }
  return kExitOk;
}

int run_obstruct(json cfg) {
  FurstenbergMap alpha = parse_map(cfg, "alpha");
  FurstenbergMap beta = parse_map(cfg, "beta");
  auto candidates = value_or<std::int64_t>(cfg, "candidates", 1000);
  auto seed = value_or<std::uint64_t>(cfg, "seed", 0x0B57AC1Eull);
  cfg["candidates"] = candidates;
  cfg["seed"] = seed;

  ObstructionReport rep = check_obstructions(alpha, beta, candidates, seed);
  bool compatible = rep.rotation_compatible && rep.winding_compatible;
  json report;
  report["mode"] = "obstruct";
  report["report"] = rep;
  report["compatible"] = compatible;
  report["config"] = cfg;
  write_report(report, value_or<std::string>(cfg, "out", ""));
  return compatible ? kExitOk : kExitObstruction;
}

int run_kinv(json cfg) {
  FurstenbergMap alpha = parse_map(cfg, "alpha");
  json report;
  report["mode"] = "k-invariant";
  KInvariant ia = k_invariant(alpha);
  report["alpha_invariant"] = ia;
  bool iso = true;
  if (cfg.contains("beta")) {
    FurstenbergMap beta = parse_map(cfg, "beta");
    KInvariant ib = k_invariant(beta);
    report["beta_invariant"] = ib;
    iso = isomorphic(ia, ib);
    report["isomorphic"] = iso;
  }
  report["config"] = cfg;
  write_report(report, value_or<std::string>(cfg, "out", ""));
  return iso ? kExitOk : kExitObstruction;
}

int run_tower(json cfg) {
  double theta = require<double>(cfg, "theta");
  auto n = value_or<std::int64_t>(cfg, "n", 10);
  cfg["n"] = n;
  RokhlinTower tower = build_tower(theta, n);
  json report;
  report["mode"] = "tower";
  report["tower"] = tower;
  report["config"] = cfg;
  write_report(report, value_or<std::string>(cfg, "out", ""));
  return kExitOk;
}

int run_solve_coboundary(json cfg) {
  double theta = require<double>(cfg, "theta");
  RealFunction f = [&] {
    if (!cfg.contains("f")) throw config_error("config is missing \"f\"");
    try {
      return cfg.at("f").get<RealFunction>();
    } catch (const std::exception& e) {
      throw config_error(std::string("config field \"f\" is malformed: ") + e.what());
    }
  }();

  json report;
  report["mode"] = "solve-coboundary";
  if (cfg.contains("d") || cfg.contains("eps")) {
    // Winding-corrected variant: f need not be mean-zero.
    int d = require<int>(cfg, "d");
    double eps = require<double>(cfg, "eps");
    WindingCoboundary wc = approx_coboundary_with_winding(f, theta, d, eps);
    report["winding_coboundary"] = wc;
  } else {
    if (!f.is_trig())
      throw config_error("exact solve requires a trig-polynomial \"f\"");
    TrigPoly g = solve_coboundary_exact(f.trig(), theta);
    report["g"] = g;
    double worst = 0.0;
    constexpr int kGrid = 1 << 12;
    for (int i = 0; i < kGrid; ++i) {
      double x = static_cast<double>(i) / kGrid;
      worst = std::max(worst,
                       std::fabs(g.eval(x) - g.eval(x + theta) - f.eval(x)));
    }
    report["residual_sup"] = worst;
    report["residual_grid"] = kGrid;
  }
  report["config"] = cfg;
  write_report(report, value_or<std::string>(cfg, "out", ""));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construct and certify conjugacies of Furstenberg transformations"};
  app.require_subcommand(1);

  Options opt;
  std::string build_mode;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--eps", opt.eps, "target defect bound (overrides config)");
    sub->add_option("--grid", opt.grid, "verification grid resolution");
    sub->add_option("--samples", opt.samples, "Monte-Carlo sample count");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--out", opt.out, "report output path (default stdout)");
  };

  CLI::App* build = app.add_subcommand("build", "construct a conjugacy");
  build->add_option("mode", build_mode, "one of m1, m2, exact, kseq")->required();
  add_common(build);
  CLI::App* obstruct = app.add_subcommand("obstruct", "run the obstruction analyzers");
  add_common(obstruct);
  CLI::App* kinv = app.add_subcommand("kinv", "K-theoretic invariant record(s)");
  add_common(kinv);
  CLI::App* tower = app.add_subcommand("tower", "build a Rokhlin tower");
  add_common(tower);
  CLI::App* solve = app.add_subcommand("solve-coboundary",
                                       "solve the cohomological equation");
  add_common(solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  try {
    json cfg = load_config(opt);
    apply_overrides(cfg, opt);
    if (build->parsed()) return run_build(build_mode, std::move(cfg));
    if (obstruct->parsed()) return run_obstruct(std::move(cfg));
    if (kinv->parsed()) return run_kinv(std::move(cfg));
    if (tower->parsed()) return run_tower(std::move(cfg));
    if (solve->parsed()) return run_solve_coboundary(std::move(cfg));
    std::cerr << "no subcommand\n";
    return kExitBadConfig;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const obstruction_error& e) {
    json report;
    report["mode"] = "obstruction";
    report["report"] = e.report();
    report["error"] = e.what();
    try {
      write_report(report, opt.out);
    } catch (const std::exception&) {
      std::cerr << e.what() << "\n";
    }
    return kExitObstruction;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
