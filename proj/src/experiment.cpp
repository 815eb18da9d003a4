#include "inls/experiment.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace inls {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

double relative_drift(double value, double reference) {
  const double diff = std::abs(value - reference);
  return reference != 0.0 ? diff / std::abs(reference) : diff;
}

std::string lambda_name(double lambda) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "lambda_%.6g", lambda);
  return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

GridPtr main_grid(const ExperimentConfig& cfg) { return build_grid(cfg.r_max, cfg.n); }

// Last snapshot index of each late Cauchy window, spread evenly over the
// second half of the run and ending at the final snapshot.
std::vector<std::size_t> window_ends(std::size_t snapshots, int window, int count) {
  std::vector<std::size_t> ends;
  if (snapshots < static_cast<std::size_t>(window) || snapshots < 2) return ends;
  const std::size_t last = snapshots - 1;
  const std::size_t first = std::max<std::size_t>(static_cast<std::size_t>(window) - 1, snapshots / 2);
  if (count <= 1 || first >= last) return {last};
  for (int j = 0; j < count; ++j) {
    const std::size_t e = first + (last - first) * static_cast<std::size_t>(j) / static_cast<std::size_t>(count - 1);
    if (ends.empty() || e > ends.back()) ends.push_back(e);
  }
  return ends;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::scattered_indicated: return "scattered_indicated";
    case Status::soliton_like: return "soliton_like";
    case Status::blowup_suspected: return "blowup_suspected";
    case Status::inconclusive: return "inconclusive";
    case Status::failed: return "failed";
  }
  return "unknown";
}

Status classify(const RunReport& r, const StatusRules& rules) {
  if (!r.error.empty()) return Status::failed;
  if (r.run_status == RunStatus::blowup_suspected) return Status::blowup_suspected;
  if (!(r.energy_drift <= rules.energy_drift_tol)) return Status::inconclusive;
  const bool dispersed = r.cauchy_defect && *r.cauchy_defect < rules.defect_threshold;
  if (r.beta_fit && std::abs(*r.beta_fit - 1.0) <= rules.beta_band && !dispersed) return Status::soliton_like;
  const bool negative_energy = r.has_threshold ? r.threshold.energy_negative : r.final_record.energy < 0.0;
  if (dispersed && r.beta_fit && *r.beta_fit < 1.0 && !negative_energy) return Status::scattered_indicated;
  return Status::inconclusive;
}

GroundStateReport run_groundstate(const ExperimentConfig& cfg) {
  GroundStateReport rep;
  rep.params = cfg.params();
  rep.gs = solve_ground_state(rep.params, main_grid(cfg), cfg.gs_tol, cfg.gs_max_iter);
  rep.gn_ratio_q = gn_ratio(rep.gs.profile, rep.params, rep.gs.c0);
  return rep;
}

Field make_initial_data(const InitialData& init, const GridPtr& grid, const GroundState* gs) {
  switch (init.family) {
    case InitialData::Family::ground_state_scaled: {
      if (!gs) throw RangeError("ground_state_scaled initial data needs a ground state");
      if (gs->profile.grid->n != grid->n || gs->profile.grid->r_max != grid->r_max)
        throw RangeError("ground state and run grid differ");
      return cplx(init.lambda) * gs->profile;
    }
    case InitialData::Family::gaussian: {
      const double a = init.amplitude, two_w2 = 2.0 * init.width * init.width;
      return sample(grid, [&](double r) { return a * std::exp(-r * r / two_w2); });
    }
  }
  throw RangeError("unknown initial data family");
}

RunReport run_single(const ExperimentConfig& cfg, const Field& u0, const PhysParams& params, const GroundState& gs,
                     std::string name) {
  RunReport rep;
  rep.name = std::move(name);
  rep.config = to_json(cfg);
  if (cfg.initial_data.family == InitialData::Family::ground_state_scaled) rep.lambda = cfg.initial_data.lambda;
  try {
    rep.threshold = threshold_check(u0, params, gs);
    rep.has_threshold = true;

    const MorawetzWeight w(cfg.morawetz_R);
    const CutoffChi chi{cfg.chi_R, cfg.chi_power};
    const Trajectory traj = evolve(u0, params, cfg.evolve, make_diagnostics_hook(params, w, chi));
    rep.run_status = traj.status;
    rep.records = traj.records;
    rep.final_record = traj.records.back();

    const auto& first = traj.records.front();
    const double grad0 = std::sqrt(first.grad_sq);
    bool held = true;
    for (const auto& r : traj.records) {
      rep.energy_drift = std::max(rep.energy_drift, relative_drift(r.energy, first.energy));
      rep.mass_drift = std::max(rep.mass_drift, relative_drift(r.mass, first.mass));
      if (grad0 > 0.0) rep.max_gradient_ratio = std::max(rep.max_gradient_ratio, std::sqrt(r.grad_sq) / grad0);
      const double prod =
          std::pow(r.mass, 0.5 * (1.0 - params.s_p)) * std::pow(r.grad_sq, 0.5 * params.s_p);
      rep.max_gradient_product = std::max(rep.max_gradient_product, prod);
      held = held && prod < rep.threshold.gradient_q * (1.0 - kThresholdEqualityTol);
    }
    rep.gradient_bound_held = held;

    if (traj.records.size() >= 10) rep.beta_fit = spacetime_potential_growth(traj).beta_fit;
    if (!traj.sponge && traj.status == RunStatus::completed) {
      for (std::size_t e : window_ends(traj.snapshots.size(), cfg.status.cauchy_window, cfg.status.defect_windows))
        rep.defect_windows.push_back(cauchy_defect(traj, e, cfg.status.cauchy_window));
      if (!rep.defect_windows.empty()) rep.cauchy_defect = rep.defect_windows.back();
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.status = classify(rep, cfg.status);
  return rep;
}

RunReport run_single(const ExperimentConfig& cfg) {
  const auto params = cfg.params();
  const auto grid = main_grid(cfg);
  const GroundState gs = solve_ground_state(params, grid, cfg.gs_tol, cfg.gs_max_iter);
  const Field u0 = make_initial_data(cfg.initial_data, grid, &gs);
  const std::string name = cfg.initial_data.family == InitialData::Family::ground_state_scaled
                               ? lambda_name(cfg.initial_data.lambda)
                               : "run";
  return run_single(cfg, u0, params, gs, name);
}

std::vector<RunReport> run_threshold_scan(const ExperimentConfig& cfg, int threads) {
  if (cfg.scan.empty()) throw ConfigError("scan: must list at least one lambda");
  const auto params = cfg.params();
  const auto grid = main_grid(cfg);
  const GroundState gs = solve_ground_state(params, grid, cfg.gs_tol, cfg.gs_max_iter);

  std::vector<RunReport> reports(cfg.scan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.scan.size(); k = next++) {
      ExperimentConfig one = cfg;
      one.scenario = Scenario::single_run;
      one.scan.clear();
      one.initial_data.family = InitialData::Family::ground_state_scaled;
      one.initial_data.lambda = cfg.scan[k];
      try {
        reports[k] = run_single(one, make_initial_data(one.initial_data, grid, &gs), params, gs,
                                lambda_name(cfg.scan[k]));
      } catch (const std::exception& e) {
        RunReport& r = reports[k];
        r.name = lambda_name(cfg.scan[k]);
        r.config = to_json(one);
        r.lambda = cfg.scan[k];
        r.error = e.what();
        r.status = Status::failed;
      }
    }
  };
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(cfg.scan.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return reports;
}

std::vector<IdentityRow> morawetz_identity_study(const Field& u0, const PhysParams& params, double R, double dt0,
                                                 int halvings, const std::vector<double>& sample_times,
                                                 std::vector<MorawetzTerms>* terms_out,
                                                 std::vector<double>* fd_out) {
  u0.check();
  if (!(dt0 > 0.0) || halvings < 0 || sample_times.empty()) throw RangeError("invalid identity study setup");
  const MorawetzWeight w(R);
  std::vector<IdentityRow> rows;
  for (int h = 0; h <= halvings; ++h) {
    const double dt = dt0 / std::ldexp(1.0, h);
    std::vector<long> at;
    for (double t : sample_times) {
      const long k = std::lround(t / dt);
      if (k < 1) throw RangeError("sample times must exceed the coarsest dt");
      at.push_back(k);
    }
    const long last = *std::max_element(at.begin(), at.end()) + 1;

    // Central difference of M_a against the four terms at each sample step.
    const SplitStepper stepper(u0.grid, params, dt);
    std::vector<double> action(at.size() * 2);
    std::vector<MorawetzTerms> terms(at.size());
    Field u = u0;
    for (long k = 0; k <= last; ++k) {
      for (std::size_t j = 0; j < at.size(); ++j) {
        if (k == at[j] - 1) action[2 * j] = morawetz_action(u, w);
        if (k == at[j] + 1) action[2 * j + 1] = morawetz_action(u, w);
        if (k == at[j]) {
          terms[j] = morawetz_derivative(u, params, w);
          terms[j].t = static_cast<double>(k) * dt;
        }
      }
      if (k < last) stepper.advance(u);
    }

    IdentityRow row;
    row.dt = dt;
    std::vector<double> fd(at.size());
    for (std::size_t j = 0; j < at.size(); ++j) {
      fd[j] = (action[2 * j + 1] - action[2 * j]) / (2.0 * dt);
      row.residual = std::max(row.residual, std::abs(fd[j] - terms[j].sum()));
    }
    if (!rows.empty() && row.residual > 0.0) row.ratio = rows.back().residual / row.residual;
    rows.push_back(row);
    if (h == halvings) {
      if (terms_out) *terms_out = terms;
      if (fd_out) *fd_out = fd;
    }
  }
  return rows;
}

MorawetzReport run_morawetz_verify(const ExperimentConfig& cfg) {
  MorawetzReport rep;
  const auto params = cfg.params();
  const auto& m = cfg.morawetz;

  // The identity study runs on its own fine grid; ground-state scaled data
  // is not resampled, so it falls back to the configured Gaussian there.
  const auto fine = build_grid(m.identity_r_max, m.identity_n);
  InitialData fine_init = cfg.initial_data;
  fine_init.family = InitialData::Family::gaussian;
  const Field u_fine = make_initial_data(fine_init, fine, nullptr);
  rep.identity = morawetz_identity_study(u_fine, params, m.identity_R, m.identity_dt, m.halvings, m.sample_times,
                                         &rep.terms, &rep.fd_derivative);

  ExperimentConfig main = cfg;
  main.scenario = Scenario::single_run;
  const auto grid = main_grid(main);
  const GroundState gs = solve_ground_state(params, grid, cfg.gs_tol, cfg.gs_max_iter);
  const Field u0 = make_initial_data(main.initial_data, grid, &gs);

  EvolveConfig ev = main.evolve;
  const Trajectory traj = evolve(u0, params, ev);
  for (double R : m.bound_R) {
    const MorawetzWeight w(R);
    double sup = 0.0;
    for (const auto& u : traj.snapshots) sup = std::max(sup, std::abs(morawetz_action(u, w)));
    rep.sup_action_over_R.emplace_back(R, sup / R);
  }

  rep.run = run_single(main, u0, params, gs, "morawetz_run");
  rep.beta_fit = rep.run.beta_fit;
  return rep;
}

std::vector<Field> random_radial_suite(const GridPtr& grid, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> shells(1, 3);
  std::uniform_real_distribution<double> center(0.0, 6.0), width(0.5, 2.0), amp(0.2, 2.0),
      phase(0.0, 2.0 * M_PI);
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    const int k = shells(rng);
    std::vector<std::array<double, 4>> params(static_cast<std::size_t>(k));
    for (auto& p : params) p = {center(rng), width(rng), amp(rng), phase(rng)};
    // Mirrored shells keep each profile even in r, hence smooth at the origin.
    out.push_back(sample(grid, [&](double r) {
      cplx v{};
      for (const auto& [c, w, a, ph] : params) {
        const double g = std::exp(-(r - c) * (r - c) / (2 * w * w)) + std::exp(-(r + c) * (r + c) / (2 * w * w));
        v += a * g * std::polar(1.0, ph);
      }
      return v;
    }));
  }
  return out;
}

std::vector<GnSweepRow> run_gn_sweep(const ExperimentConfig& cfg) {
  const auto grid = main_grid(cfg);
  const auto suite = random_radial_suite(grid, cfg.gn.samples, cfg.seed);
  std::vector<GnSweepRow> rows;
  for (const auto& [p, b] : cfg.gn.pairs) {
    const auto params = make_params(p, b);
    const GroundState gs = solve_ground_state(params, grid, cfg.gs_tol, cfg.gs_max_iter);
    GnSweepRow row;
    row.p = p;
    row.b = b;
    row.grad_over_mass = gs.grad_Q / gs.mass_Q;
    row.pot_over_mass = gs.pot_Q / gs.mass_Q;
    row.c_pdb = params.c_pdb;
    row.c0 = gs.c0;
    row.gn_ratio_q = gn_ratio(gs.profile, params, gs.c0);
    for (const auto& f : suite) {
      row.max_gn_ratio_suite = std::max(row.max_gn_ratio_suite, gn_ratio(f, params, gs.c0));
      row.max_sobolev_ratio_suite = std::max(row.max_sobolev_ratio_suite, radial_sobolev_ratio(f));
    }
    row.iterations = gs.iterations;
    row.residual = gs.residual;
    rows.push_back(row);
  }
  return rows;
}

json to_json(const RunReport& r) {
  json j{
      {"name", r.name},
      {"lambda", optional_json(r.lambda)},
      {"status", to_string(r.status)},
      {"run_status", to_string(r.run_status)},
      {"beta_fit", optional_json(r.beta_fit)},
      {"cauchy_defect", optional_json(r.cauchy_defect)},
      {"defect_windows", r.defect_windows},
      {"energy_drift", r.energy_drift},
      {"mass_drift", r.mass_drift},
      {"max_gradient_ratio", r.max_gradient_ratio},
      {"max_gradient_product", r.max_gradient_product},
      {"gradient_bound_held", r.gradient_bound_held},
      {"final_record",
       {{"t", r.final_record.t},
        {"mass", r.final_record.mass},
        {"energy", r.final_record.energy},
        {"grad_sq", r.final_record.grad_sq},
        {"potential", r.final_record.potential},
        {"morawetz_action", r.final_record.morawetz_action},
        {"local_mass", r.final_record.local_mass},
        {"h1_norm", r.final_record.h1_norm}}},
      {"error", r.error},
      {"config", r.config},
  };
  if (r.has_threshold) {
    const auto& t = r.threshold;
    j["threshold"] = {{"below", t.below()},
                      {"energy_negative", t.energy_negative},
                      {"mass_energy", number_or_null(t.mass_energy)},
                      {"mass_energy_q", t.mass_energy_q},
                      {"margin_mass_energy", number_or_null(t.margin_mass_energy)},
                      {"gradient", t.gradient},
                      {"gradient_q", t.gradient_q},
                      {"margin_gradient", t.margin_gradient}};
  } else {
    j["threshold"] = nullptr;
  }
  return j;
}

void write_scan_summary_csv(const std::vector<RunReport>& reports, const fs::path& path) {
  std::vector<const RunReport*> order;
  for (const auto& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const RunReport* a, const RunReport* b) {
    return a->lambda.value_or(std::numeric_limits<double>::infinity()) <
           b->lambda.value_or(std::numeric_limits<double>::infinity());
  });
  auto out = open_for_write(path);
  out << "lambda,below,beta_fit,cauchy_defect,status\n";
  for (const RunReport* r : order) {
    if (r->lambda) out << *r->lambda;
    out << ',' << (r->has_threshold ? (r->threshold.below() ? "true" : "false") : "") << ',';
    if (r->beta_fit) out << *r->beta_fit;
    out << ',';
    if (r->cauchy_defect) out << *r->cauchy_defect;
    out << ',' << to_string(r->status) << '\n';
  }
  finish_write(out, path);
}

void write_identity_csv(const std::vector<IdentityRow>& rows, const fs::path& path) {
  auto out = open_for_write(path);
  out << "dt,residual,ratio\n";
  for (const auto& r : rows) {
    out << r.dt << ',' << r.residual << ',';
    if (r.ratio) out << *r.ratio;
    out << '\n';
  }
  finish_write(out, path);
}

void write_action_bound_csv(const std::vector<std::pair<double, double>>& rows, const fs::path& path) {
  auto out = open_for_write(path);
  out << "R,sup_action_over_R\n";
  for (const auto& [R, v] : rows) out << R << ',' << v << '\n';
  finish_write(out, path);
}

void write_gn_sweep_csv(const std::vector<GnSweepRow>& rows, const fs::path& path) {
  auto out = open_for_write(path);
  out << "p,b,grad_over_mass,pot_over_mass,c_pdb,c0,gn_ratio_q,max_gn_ratio_suite,max_sobolev_ratio_suite,"
         "iterations,residual\n";
  for (const auto& r : rows)
    out << r.p << ',' << r.b << ',' << r.grad_over_mass << ',' << r.pot_over_mass << ',' << r.c_pdb << ',' << r.c0
        << ',' << r.gn_ratio_q << ',' << r.max_gn_ratio_suite << ',' << r.max_sobolev_ratio_suite << ','
        << r.iterations << ',' << r.residual << '\n';
  finish_write(out, path);
}

std::uint32_t file_crc32(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for checksumming");
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

void write_svg_plot(const fs::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<std::pair<double, double>>& points,
                    bool log_log) {
  constexpr double W = 640, H = 420, L = 70, Rm = 20, T = 40, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (auto [x, y] : points) {
    if (log_log) {
      if (!(x > 0.0 && y > 0.0)) continue;
      x = std::log10(x);
      y = std::log10(y);
    }
    if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts.front().first;
    y0 = y1 = pts.front().second;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 <= 0.0) x1 = x0 + 1.0;
  if (y1 - y0 <= 0.0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - Rm); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  auto out = open_for_write(path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << (log_log ? "log10 " : "") << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << H / 2 << ")\">" << (log_log ? "log10 " : "") << y_label << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << fx
        << "</text>\n"
        << "<text x=\"" << L - 6 << "\" y=\"" << py(fy) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << fy
        << "</text>\n";
  }
  if (!pts.empty()) {
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
  finish_write(out, path);
}

std::vector<EmittedFile> emit_outputs(const std::vector<RunReport>& reports, const fs::path& dir,
                                      const json& config_echo, const std::vector<fs::path>& extra_files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<EmittedFile> files;
  auto add = [&](const fs::path& p) { files.push_back({p, file_crc32(p)}); };
  json runs = json::array();

  for (const auto& r : reports) {
    json entry = to_json(r);
    json run_files = json::array();
    if (!r.records.empty()) {
      const fs::path csv = dir / (r.name + "_diagnostics.csv");
      write_records_csv(r.records, csv);
      add(csv);
      run_files.push_back(csv.filename().string());

      std::vector<std::pair<double, double>> pot, act, cum;
      double c = 0.0;
      for (std::size_t k = 0; k < r.records.size(); ++k) {
        const auto& rec = r.records[k];
        pot.emplace_back(rec.t, rec.potential);
        act.emplace_back(rec.t, rec.morawetz_action);
        if (k > 0) {
          const auto& prev = r.records[k - 1];
          c += 0.5 * (rec.t - prev.t) * (rec.potential + prev.potential);
          cum.emplace_back(rec.t - r.records.front().t, c);
        }
      }
      const fs::path p1 = dir / (r.name + "_potential.svg"), p2 = dir / (r.name + "_cumulative_potential.svg"),
                     p3 = dir / (r.name + "_morawetz_action.svg");
      write_svg_plot(p1, r.name + ": potential", "t", "potential", pot);
      write_svg_plot(p2, r.name + ": cumulative potential", "T", "integral of potential", cum, true);
      write_svg_plot(p3, r.name + ": Morawetz action", "t", "M_a", act);
      for (const auto& p : {p1, p2, p3}) {
        add(p);
        run_files.push_back(p.filename().string());
      }
    }
    entry["files"] = run_files;
    entry.erase("config");
    runs.push_back(entry);
  }

  const bool scan = std::any_of(reports.begin(), reports.end(), [](const RunReport& r) { return r.lambda.has_value(); });
  if (scan) {
    const fs::path summary = dir / "scan_summary.csv";
    write_scan_summary_csv(reports, summary);
    add(summary);
  }
  for (const auto& p : extra_files) add(p);

  json manifest{{"schema_version", kManifestSchemaVersion}, {"config", config_echo}, {"run_count", reports.size()},
                {"runs", runs}};
  if (!reports.empty()) manifest["status_rules"] = reports.front().config.value("status_rules", json::object());
  json listed = json::array();
  for (const auto& f : files) {
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08x", f.crc32);
    listed.push_back({{"path", fs::relative(f.path, dir).generic_string()}, {"crc32", hex}});
  }
  manifest["files"] = listed;

  const fs::path mpath = dir / "manifest.json";
  std::ofstream out(mpath, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + mpath.string() + " for writing");
  out << manifest.dump(2) << '\n';
  finish_write(out, mpath);
  files.push_back({mpath, file_crc32(mpath)});
  return files;
}

}  // namespace inls
