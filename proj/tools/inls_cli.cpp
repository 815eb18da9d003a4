// Command-line driver: one subcommand per experiment scenario.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "inls/experiment.hpp"

using namespace inls;
namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputEnv = "INLS_OUTPUT_DIR";

struct Options {
  std::string config_path;
  std::string out;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<std::size_t> n;
  std::optional<double> r_max;
};

ExperimentConfig load_config(const Options& opt, Scenario scenario) {
  nlohmann::json doc;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot read config " + opt.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(opt.config_path + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(opt.config_path + ": expected an object");
  } else {
    doc = to_json(ExperimentConfig{});
    doc.erase("scan");
    doc.erase("scenario");
  }
  if (!doc.contains("scenario")) doc["scenario"] = to_string(scenario);
  ExperimentConfig cfg = parse_config(doc);
  if (cfg.scenario != scenario)
    throw ConfigError(std::string("scenario: config says ") + to_string(cfg.scenario) + " but the subcommand runs " +
                      to_string(scenario));

  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.dt) cfg.evolve.dt = *opt.dt;
  if (opt.n) cfg.n = *opt.n;
  if (opt.r_max) cfg.r_max = *opt.r_max;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  else if (const char* env = std::getenv(kOutputEnv); env && *env) cfg.output_dir = env;
  // Overrides go through the same validation as the file.
  return parse_config(to_json(cfg));
}

int report_failures(const std::vector<RunReport>& reports) {
  int failed = 0;
  for (const auto& r : reports) {
    std::cout << r.name << ": " << to_string(r.status);
    if (r.beta_fit) std::cout << "  beta=" << *r.beta_fit;
    if (r.cauchy_defect) std::cout << "  defect=" << *r.cauchy_defect;
    std::cout << '\n';
    if (r.status == Status::failed) ++failed;
  }
  if (failed) {
    std::cerr << failed << " run(s) failed:\n";
    for (const auto& r : reports)
      if (r.status == Status::failed) std::cerr << "  " << r.name << ": " << r.error << '\n';
  }
  return failed ? 1 : 0;
}

int cmd_groundstate(const ExperimentConfig& cfg) {
  const auto rep = run_groundstate(cfg);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const fs::path csv = dir / "ground_state.csv";
  save_ground_state_csv(rep.gs, csv);
  emit_outputs({}, dir, to_json(cfg), {csv});
  std::cout << std::setprecision(10) << "iterations=" << rep.gs.iterations << " residual=" << rep.gs.residual
            << "\n|grad Q|^2/|Q|^2=" << rep.gs.grad_Q / rep.gs.mass_Q << " potential/|Q|^2="
            << rep.gs.pot_Q / rep.gs.mass_Q << " C_pdb=" << rep.params.c_pdb << "\nc0=" << rep.gs.c0
            << " gn_ratio(Q)=" << rep.gn_ratio_q << '\n';
  return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
  std::vector<RunReport> reports{run_single(cfg)};
  emit_outputs(reports, cfg.output_dir, to_json(cfg));
  return report_failures(reports);
}

int cmd_scan(const ExperimentConfig& cfg, int threads) {
  const auto reports = run_threshold_scan(cfg, threads);
  emit_outputs(reports, cfg.output_dir, to_json(cfg));
  return report_failures(reports);
}

int cmd_morawetz(const ExperimentConfig& cfg) {
  const auto rep = run_morawetz_verify(cfg);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const fs::path identity = dir / "morawetz_identity.csv", terms = dir / "morawetz_terms.csv",
                 bound = dir / "morawetz_action_bound.csv";
  write_identity_csv(rep.identity, identity);
  write_morawetz_terms_csv(rep.terms, terms);
  write_action_bound_csv(rep.sup_action_over_R, bound);
  emit_outputs({rep.run}, dir, to_json(cfg), {identity, terms, bound});

  std::cout << std::setprecision(6);
  for (const auto& row : rep.identity) {
    std::cout << "dt=" << row.dt << " residual=" << row.residual;
    if (row.ratio) std::cout << " ratio=" << *row.ratio;
    std::cout << '\n';
  }
  for (const auto& [R, v] : rep.sup_action_over_R) std::cout << "R=" << R << " sup|M_a|/R=" << v << '\n';
  return report_failures({rep.run});
}

int cmd_gn_sweep(const ExperimentConfig& cfg) {
  const auto rows = run_gn_sweep(cfg);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const fs::path csv = dir / "gn_sweep.csv";
  write_gn_sweep_csv(rows, csv);
  emit_outputs({}, dir, to_json(cfg), {csv});
  std::cout << std::setprecision(8);
  for (const auto& r : rows)
    std::cout << "p=" << r.p << " b=" << r.b << " gn_ratio(Q)=" << r.gn_ratio_q
              << " max suite gn_ratio=" << r.max_gn_ratio_suite
              << " max Sobolev ratio=" << r.max_sobolev_ratio_suite << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial 2D inhomogeneous NLS experiments"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, std::string("output directory (overrides ") + kOutputEnv + ")");
    sub->add_option("--threads", opt.threads, "worker threads for scans")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed for randomized suites");
    sub->add_option("--dt", opt.dt, "time step override");
    sub->add_option("--n", opt.n, "grid size override");
    sub->add_option("--rmax", opt.r_max, "domain radius override");
  };

  struct Entry {
    const char* name;
    const char* help;
    Scenario scenario;
  };
  const Entry entries[] = {
      {"groundstate", "solve for Q and report its relations", Scenario::groundstate_only},
      {"run", "evolve a single initial datum", Scenario::single_run},
      {"scan", "threshold scan over u0 = lambda Q", Scenario::threshold_scan},
      {"verify-morawetz", "Morawetz identity and action bound checks", Scenario::morawetz_verify},
      {"gn-sweep", "Gagliardo-Nirenberg sweep over (p, b) pairs", Scenario::gn_sweep},
  };
  std::vector<std::pair<CLI::App*, Scenario>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub);
    subs.emplace_back(sub, e.scenario);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, scenario] : subs) {
      if (!sub->parsed()) continue;
      const ExperimentConfig cfg = load_config(opt, scenario);
      switch (scenario) {
        case Scenario::groundstate_only: return cmd_groundstate(cfg);
        case Scenario::single_run: return cmd_run(cfg);
        case Scenario::threshold_scan: return cmd_scan(cfg, opt.threads);
        case Scenario::morawetz_verify: return cmd_morawetz(cfg);
        case Scenario::gn_sweep: return cmd_gn_sweep(cfg);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
