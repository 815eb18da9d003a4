#include <cmath>
#include <set>

#include "inls/experiment.hpp"

namespace inls {

using nlohmann::json;

namespace {

// Strict view of one JSON object: every key read is remembered and
// finish() rejects whatever is left.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_or_root() + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  template <class T>
  void require(const std::string& key, T& out) {
    if (!obj_.contains(key)) throw ConfigError(field(key) + ": required field missing");
    read(key, out);
  }

  ObjectReader child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return ObjectReader(obj_.contains(key) ? obj_.at(key) : empty, field(key));
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw ConfigError(field(key) + ": unknown key");
  }

 private:
  std::string path_or_root() const { return path_.empty() ? "<root>" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

const char* family_name(InitialData::Family f) {
  return f == InitialData::Family::gaussian ? "gaussian" : "ground_state_scaled";
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::groundstate_only: return "groundstate_only";
    case Scenario::single_run: return "single_run";
    case Scenario::threshold_scan: return "threshold_scan";
    case Scenario::morawetz_verify: return "morawetz_verify";
    case Scenario::gn_sweep: return "gn_sweep";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& s) {
  for (auto sc : {Scenario::groundstate_only, Scenario::single_run, Scenario::threshold_scan,
                  Scenario::morawetz_verify, Scenario::gn_sweep})
    if (s == to_string(sc)) return sc;
  throw ConfigError("scenario: unknown value '" + s + "'");
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  ObjectReader root(doc, "");

  root.require("schema_version", cfg.schema_version);
  check(cfg.schema_version == kConfigSchemaVersion, "schema_version",
        "unsupported version " + std::to_string(cfg.schema_version));

  std::string scenario;
  root.require("scenario", scenario);
  cfg.scenario = scenario_from_string(scenario);

  {
    auto params = root.child("params");
    params.require("p", cfg.p);
    params.require("b", cfg.b);
    params.finish();
    try {
      (void)make_params(cfg.p, cfg.b);
    } catch (const RangeError& e) {
      throw ConfigError(std::string("params: ") + e.what());
    }
  }
  {
    auto grid = root.child("grid");
    grid.read("r_max", cfg.r_max);
    grid.read("n", cfg.n);
    grid.finish();
    check(cfg.r_max > 0.0, "grid.r_max", "must be positive");
    check(cfg.n >= 16, "grid.n", "must be at least 16");
  }
  {
    auto ev = root.child("evolve");
    ev.read("dt", cfg.evolve.dt);
    ev.read("t_end", cfg.evolve.t_end);
    ev.read("sponge_strength", cfg.evolve.sponge_strength);
    ev.read("sponge_start", cfg.evolve.sponge_start);
    ev.read("snapshot_stride", cfg.evolve.snapshot_stride);
    ev.read("blowup_factor", cfg.evolve.blowup_factor);
    ev.finish();
    check(cfg.evolve.dt > 0.0, "evolve.dt", "must be positive");
    check(cfg.evolve.t_end > 0.0, "evolve.t_end", "must be positive");
    check(cfg.evolve.snapshot_stride >= 1, "evolve.snapshot_stride", "must be at least 1");
    check(cfg.evolve.sponge_strength >= 0.0, "evolve.sponge_strength", "must be nonnegative");
    check(cfg.evolve.sponge_strength == 0.0 || (cfg.evolve.sponge_start > 0.0 && cfg.evolve.sponge_start < cfg.r_max),
          "evolve.sponge_start", "must lie in (0, grid.r_max) when the sponge is on");
    check(cfg.evolve.blowup_factor > 1.0, "evolve.blowup_factor", "must exceed 1");
  }
  {
    auto init = root.child("initial_data");
    std::string family = family_name(cfg.initial_data.family);
    init.read("family", family);
    if (family == "gaussian") cfg.initial_data.family = InitialData::Family::gaussian;
    else if (family == "ground_state_scaled") cfg.initial_data.family = InitialData::Family::ground_state_scaled;
    else throw ConfigError("initial_data.family: unknown value '" + family + "'");
    init.read("lambda", cfg.initial_data.lambda);
    init.read("amplitude", cfg.initial_data.amplitude);
    init.read("width", cfg.initial_data.width);
    init.finish();
    check(cfg.initial_data.width > 0.0, "initial_data.width", "must be positive");
  }
  if (cfg.scenario == Scenario::threshold_scan) {
    check(root.has("scan"), "scan", "required field missing for scenario threshold_scan");
    root.read("scan", cfg.scan);
    check(!cfg.scan.empty(), "scan", "must list at least one lambda");
  } else {
    root.read("scan", cfg.scan);
  }
  for (double l : cfg.scan) check(std::isfinite(l) && l >= 0.0, "scan", "lambda values must be finite and >= 0");
  {
    auto gs = root.child("groundstate");
    gs.read("tol", cfg.gs_tol);
    gs.read("max_iter", cfg.gs_max_iter);
    gs.finish();
    check(cfg.gs_tol > 0.0, "groundstate.tol", "must be positive");
    check(cfg.gs_max_iter > 0, "groundstate.max_iter", "must be positive");
  }
  {
    auto d = root.child("diagnostics");
    d.read("morawetz_R", cfg.morawetz_R);
    d.read("chi_R", cfg.chi_R);
    d.read("chi_power", cfg.chi_power);
    d.finish();
    check(cfg.morawetz_R > 0.0, "diagnostics.morawetz_R", "must be positive");
    check(cfg.chi_R > 0.0, "diagnostics.chi_R", "must be positive");
    check(cfg.chi_power == 1 || cfg.chi_power == 2, "diagnostics.chi_power", "must be 1 or 2");
  }
  {
    auto s = root.child("status_rules");
    s.read("defect_threshold", cfg.status.defect_threshold);
    s.read("beta_band", cfg.status.beta_band);
    s.read("energy_drift_tol", cfg.status.energy_drift_tol);
    s.read("cauchy_window", cfg.status.cauchy_window);
    s.read("defect_windows", cfg.status.defect_windows);
    s.finish();
    check(cfg.status.cauchy_window >= 3, "status_rules.cauchy_window", "must be at least 3");
    check(cfg.status.defect_windows >= 1, "status_rules.defect_windows", "must be at least 1");
  }
  {
    auto m = root.child("morawetz");
    m.read("identity_R", cfg.morawetz.identity_R);
    m.read("identity_dt", cfg.morawetz.identity_dt);
    m.read("halvings", cfg.morawetz.halvings);
    m.read("sample_times", cfg.morawetz.sample_times);
    m.read("identity_r_max", cfg.morawetz.identity_r_max);
    m.read("identity_n", cfg.morawetz.identity_n);
    m.read("bound_R", cfg.morawetz.bound_R);
    m.finish();
    check(cfg.morawetz.halvings >= 1, "morawetz.halvings", "must be at least 1");
    check(!cfg.morawetz.sample_times.empty(), "morawetz.sample_times", "must not be empty");
    for (double t : cfg.morawetz.sample_times)
      check(t > cfg.morawetz.identity_dt, "morawetz.sample_times", "each time must exceed identity_dt");
    check(cfg.morawetz.identity_n >= 16, "morawetz.identity_n", "must be at least 16");
  }
  {
    auto g = root.child("gn_sweep");
    if (g.has("pairs")) {
      cfg.gn.pairs.clear();
      const auto& arr = g.raw("pairs");
      check(arr.is_array(), "gn_sweep.pairs", "expected an array of [p, b] pairs");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        const std::string f = "gn_sweep.pairs[" + std::to_string(i) + "]";
        check(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(), f, "expected [p, b]");
        try {
          (void)make_params(e[0].get<double>(), e[1].get<double>());
        } catch (const RangeError& ex) {
          throw ConfigError(f + ": " + ex.what());
        }
        cfg.gn.pairs.emplace_back(e[0].get<double>(), e[1].get<double>());
      }
    }
    g.read("samples", cfg.gn.samples);
    g.finish();
    check(cfg.gn.samples >= 1, "gn_sweep.samples", "must be positive");
  }
  root.read("output_dir", cfg.output_dir);
  root.read("seed", cfg.seed);
  root.finish();
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json pairs = json::array();
  for (const auto& [p, b] : cfg.gn.pairs) pairs.push_back({p, b});
  return json{
      {"schema_version", cfg.schema_version},
      {"scenario", to_string(cfg.scenario)},
      {"params", {{"p", cfg.p}, {"b", cfg.b}}},
      {"grid", {{"r_max", cfg.r_max}, {"n", cfg.n}}},
      {"evolve",
       {{"dt", cfg.evolve.dt},
        {"t_end", cfg.evolve.t_end},
        {"sponge_strength", cfg.evolve.sponge_strength},
        {"sponge_start", cfg.evolve.sponge_start},
        {"snapshot_stride", cfg.evolve.snapshot_stride},
        {"blowup_factor", cfg.evolve.blowup_factor}}},
      {"initial_data",
       {{"family", family_name(cfg.initial_data.family)},
        {"lambda", cfg.initial_data.lambda},
        {"amplitude", cfg.initial_data.amplitude},
        {"width", cfg.initial_data.width}}},
      {"scan", cfg.scan},
      {"groundstate", {{"tol", cfg.gs_tol}, {"max_iter", cfg.gs_max_iter}}},
      {"diagnostics", {{"morawetz_R", cfg.morawetz_R}, {"chi_R", cfg.chi_R}, {"chi_power", cfg.chi_power}}},
      {"status_rules", status_rules_json(cfg.status)},
      {"morawetz",
       {{"identity_R", cfg.morawetz.identity_R},
        {"identity_dt", cfg.morawetz.identity_dt},
        {"halvings", cfg.morawetz.halvings},
        {"sample_times", cfg.morawetz.sample_times},
        {"identity_r_max", cfg.morawetz.identity_r_max},
        {"identity_n", cfg.morawetz.identity_n},
        {"bound_R", cfg.morawetz.bound_R}}},
      {"gn_sweep", {{"pairs", pairs}, {"samples", cfg.gn.samples}}},
      {"output_dir", cfg.output_dir},
      {"seed", cfg.seed},
  };
}

json status_rules_json(const StatusRules& rules) {
  return json{{"defect_threshold", rules.defect_threshold},
              {"beta_band", rules.beta_band},
              {"energy_drift_tol", rules.energy_drift_tol},
              {"cauchy_window", rules.cauchy_window},
              {"defect_windows", rules.defect_windows}};
}

}  // namespace inls
