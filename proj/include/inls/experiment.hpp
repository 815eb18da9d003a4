// Config-driven experiments: ground states, single runs, threshold scans,
// Morawetz verification and Gagliardo-Nirenberg sweeps, plus their outputs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "inls/diagnostics.hpp"

namespace inls {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;

/// Schema violation, with the offending field path in the message.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scenario { groundstate_only, single_run, threshold_scan, morawetz_verify, gn_sweep };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct InitialData {
  enum class Family { ground_state_scaled, gaussian };
  Family family = Family::gaussian;
  double lambda = 0.5;     ///< ground_state_scaled: u0 = λQ
  double amplitude = 0.3;  ///< gaussian: A e^{-r²/(2w²)}
  double width = 1.0;
};

struct StatusRules {
  double defect_threshold = 1e-2;  ///< defect below this → scattered_indicated
  double beta_band = 0.1;          ///< |β - 1| ≤ band → soliton_like
  double energy_drift_tol = 1e-2;  ///< larger drift → inconclusive
  int cauchy_window = 6;           ///< snapshots per Cauchy-defect window
  int defect_windows = 3;          ///< successive late windows reported
};

struct MorawetzStudy {
  double identity_R = 1.0;
  double identity_dt = 0.02;
  int halvings = 3;
  std::vector<double> sample_times{0.125, 0.25, 0.5};
  double identity_r_max = 20.0;
  std::size_t identity_n = 32768;
  std::vector<double> bound_R{10.0, 20.0, 40.0};
};

struct GnSweep {
  std::vector<std::pair<double, double>> pairs{{2.0, 0.5}, {3.0, 0.3}, {2.5, 0.8}};
  int samples = 100;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  Scenario scenario = Scenario::single_run;
  double p = 2.0;
  double b = 0.5;
  double r_max = 60.0;
  std::size_t n = 4096;
  EvolveConfig evolve{.dt = 1e-3, .t_end = 2.0, .snapshot_stride = 20};
  InitialData initial_data;
  std::vector<double> scan;
  double gs_tol = 1e-10;
  int gs_max_iter = 1000;
  double morawetz_R = 10.0;
  double chi_R = 10.0;
  int chi_power = 1;
  StatusRules status;
  MorawetzStudy morawetz;
  GnSweep gn;
  std::string output_dir = "out";
  std::uint64_t seed = 12345;

  PhysParams params() const { return make_params(p, b); }
};

/// Parses and validates a JSON document; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config(const std::string& text);
/// Full config with every default materialized.
nlohmann::json to_json(const ExperimentConfig& cfg);

enum class Status { scattered_indicated, soliton_like, blowup_suspected, inconclusive, failed };

const char* to_string(Status s);

struct RunReport {
  std::string name;
  nlohmann::json config;
  std::optional<double> lambda;
  DiagnosticsRecord final_record;
  std::vector<DiagnosticsRecord> records;
  std::optional<double> beta_fit;
  std::optional<double> cauchy_defect;
  std::vector<double> defect_windows;  ///< successive late windows, earliest first
  ThresholdReport threshold;
  bool has_threshold = false;
  double energy_drift = 0.0;
  double mass_drift = 0.0;
  double max_gradient_ratio = 0.0;  ///< max_t ‖∇u(t)‖ / ‖∇u0‖
  double max_gradient_product = 0.0;  ///< max_t ‖u‖^{1-s_p}‖∇u‖^{s_p}
  bool gradient_bound_held = false;   ///< below the Q product at every snapshot
  RunStatus run_status = RunStatus::completed;
  Status status = Status::inconclusive;
  std::string error;
};

/// Deterministic status from recorded metrics.
Status classify(const RunReport& r, const StatusRules& rules);
nlohmann::json status_rules_json(const StatusRules& rules);

struct GroundStateReport {
  GroundState gs;
  PhysParams params;
  double gn_ratio_q = 0.0;
};

GroundStateReport run_groundstate(const ExperimentConfig& cfg);

/// Builds u0 from the config's initial-data descriptor.
Field make_initial_data(const InitialData& init, const GridPtr& grid, const GroundState* gs);

/// Evolves one initial datum and fills every report field.
RunReport run_single(const ExperimentConfig& cfg, const Field& u0, const PhysParams& params, const GroundState& gs,
                     std::string name);

RunReport run_single(const ExperimentConfig& cfg);

/// One report per λ, ordered as in cfg.scan. Runs are spread over `threads`
/// workers; a failing run is reported with status "failed" and an error.
std::vector<RunReport> run_threshold_scan(const ExperimentConfig& cfg, int threads = 1);

struct IdentityRow {
  double dt = 0.0;
  double residual = 0.0;
  std::optional<double> ratio;  ///< previous residual / this one
};

struct MorawetzReport {
  std::vector<IdentityRow> identity;
  std::vector<MorawetzTerms> terms;     ///< at the sample times, finest dt
  std::vector<double> fd_derivative;    ///< matching finite differences
  std::vector<std::pair<double, double>> sup_action_over_R;  ///< (R, sup_t |M_a| / R)
  std::optional<double> beta_fit;
  RunReport run;
};

/// Identity residual versus dt halvings, term table, action bound sweep and β.
MorawetzReport run_morawetz_verify(const ExperimentConfig& cfg);

/// Residual study alone: one row per dt = dt0 / 2^k, k = 0..halvings.
std::vector<IdentityRow> morawetz_identity_study(const Field& u0, const PhysParams& params, double R, double dt0,
                                                 int halvings, const std::vector<double>& sample_times,
                                                 std::vector<MorawetzTerms>* terms_out = nullptr,
                                                 std::vector<double>* fd_out = nullptr);

/// Smooth random radial profiles: sums of Gaussian shells with random
/// centers, widths, amplitudes and phases.
std::vector<Field> random_radial_suite(const GridPtr& grid, int count, std::uint64_t seed);

struct GnSweepRow {
  double p = 0.0, b = 0.0;
  double grad_over_mass = 0.0;
  double pot_over_mass = 0.0;
  double c_pdb = 0.0;
  double c0 = 0.0;
  double gn_ratio_q = 0.0;
  double max_gn_ratio_suite = 0.0;
  double max_sobolev_ratio_suite = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

std::vector<GnSweepRow> run_gn_sweep(const ExperimentConfig& cfg);

struct EmittedFile {
  std::filesystem::path path;
  std::uint32_t crc32 = 0;
};

/// Writes per-run diagnostics CSVs, the scan summary (sorted by λ), SVG
/// plots and a schema-versioned manifest. Returns every file written.
/// Files in `extra_files` (already written, e.g. by another scenario) are
/// checksummed into the manifest as well.
std::vector<EmittedFile> emit_outputs(const std::vector<RunReport>& reports, const std::filesystem::path& dir,
                                      const nlohmann::json& config_echo = nlohmann::json::object(),
                                      const std::vector<std::filesystem::path>& extra_files = {});

/// Scan summary CSV: lambda,below,beta_fit,cauchy_defect,status.
void write_scan_summary_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path);

std::uint32_t file_crc32(const std::filesystem::path& path);

/// Minimal line chart (one polyline per series) as standalone SVG.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<std::pair<double, double>>& points,
                    bool log_log = false);

nlohmann::json to_json(const RunReport& r);

/// Columns dt,residual,ratio (ratio empty on the first row).
void write_identity_csv(const std::vector<IdentityRow>& rows, const std::filesystem::path& path);
/// Columns R,sup_action_over_R.
void write_action_bound_csv(const std::vector<std::pair<double, double>>& rows, const std::filesystem::path& path);
/// One row per (p, b) pair with every GnSweepRow field.
void write_gn_sweep_csv(const std::vector<GnSweepRow>& rows, const std::filesystem::path& path);

}  // namespace inls
