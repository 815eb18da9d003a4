#include "inls/evolution.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "inls/functionals.hpp"

namespace inls {

namespace {

long step_count(double t, double dt) {
  const double ratio = std::abs(t) / dt;
  return std::max<long>(1, static_cast<long>(std::ceil(ratio - 1e-9)));
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_suspected: return "blowup_suspected";
  }
  return "unknown";
}

void EvolveConfig::validate(const RadialGrid& grid) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw RangeError("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw RangeError("t_end must be positive");
  if (snapshot_stride < 1) throw RangeError("snapshot_stride must be at least 1");
  if (sponge_strength < 0.0) throw RangeError("sponge_strength must be nonnegative");
  if (sponge_strength > 0.0 && !(sponge_start > 0.0 && sponge_start < grid.r_max))
    throw RangeError("sponge_start must lie in (0, r_max)");
  if (!(blowup_factor > 1.0)) throw RangeError("blowup_factor must exceed 1");
}

FreeStepper::FreeStepper(const GridPtr& grid, double dt)
    : grid_(grid), dt_(dt), stencil_(laplacian_stencil(*grid)) {
  const std::size_t n = grid->n;
  const cplx ih(0.0, 0.5 * dt);
  std::vector<cplx> lower(n), diag(n), upper(n);
  offset_lower_.resize(n);
  offset_diag_.resize(n);
  offset_upper_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = -ih * stencil_.lower[i];
    diag[i] = 1.0 - ih * stencil_.diag[i];
    upper[i] = -ih * stencil_.upper[i];
    offset_lower_[i] = ih * stencil_.lower[i];
    offset_diag_[i] = 1.0 + ih * stencil_.diag[i];
    offset_upper_[i] = ih * stencil_.upper[i];
  }
  implicit_ = TridiagonalLU<cplx>(lower, diag, upper);
}

void FreeStepper::advance(std::span<cplx> u) const {
  const std::size_t n = u.size();
  // (1 + i dt/2 Δ) u computed in place with a one-entry carry.
  cplx prev = u[0];
  for (std::size_t i = 0; i < n; ++i) {
    const cplx cur = u[i];
    cplx v = offset_diag_[i] * cur;
    if (i > 0) v += offset_lower_[i] * prev;
    if (i + 1 < n) v += offset_upper_[i] * u[i + 1];
    u[i] = v;
    prev = cur;
  }
  implicit_.solve(u);
}

SplitStepper::SplitStepper(const GridPtr& grid, const PhysParams& params, double dt, bool nonlinear)
    : params_(params), linear_(grid, dt), weight_(singular_weight_averaged(*grid, params.b)), nonlinear_(nonlinear) {}

void SplitStepper::rotate(std::span<cplx> u, double h) const {
  const double p = params_.p;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double phase = h * weight_[i] * abs_pow(std::norm(u[i]), p);
    u[i] *= cplx(std::cos(phase), std::sin(phase));
  }
}

void SplitStepper::advance(Field& u) const {
  std::span<cplx> v(u.values);
  const double h = 0.5 * linear_.dt();
  if (nonlinear_) rotate(v, h);
  linear_.advance(v);
  if (nonlinear_) rotate(v, h);
}

Field step(const Field& u, const PhysParams& params, double dt, bool nonlinear) {
  u.check();
  if (dt == 0.0 || !std::isfinite(dt)) throw RangeError("dt must be finite and nonzero");
  SplitStepper stepper(u.grid, params, dt, nonlinear);
  Field out = u;
  stepper.advance(out);
  return out;
}

std::vector<double> sponge_profile(const RadialGrid& grid, double sponge_start) {
  std::vector<double> sigma(grid.n, 0.0);
  const double width = grid.r_max - sponge_start;
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (grid.r[i] <= sponge_start) continue;
    const double s = std::min(1.0, (grid.r[i] - sponge_start) / width);
    sigma[i] = s * s * (3.0 - 2.0 * s);
  }
  return sigma;
}

Trajectory evolve(const Field& u0, const PhysParams& params, const EvolveConfig& cfg, const DiagnosticsHook& hook,
                  double t0) {
  u0.check();
  cfg.validate(*u0.grid);
  const auto& grid = u0.grid;

  DiagnosticsHook record = hook;
  if (!record) {
    record = [params](double t, const Field& u) {
      DiagnosticsRecord r;
      r.t = t;
      r.mass = mass(u);
      r.grad_sq = grad_sq(u);
      r.potential = potential(u, params);
      r.energy = 0.5 * r.grad_sq - r.potential / (params.p + 2.0);
      r.h1_norm = std::sqrt(r.mass + r.grad_sq);
      return r;
    };
  }

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.sponge = cfg.sponge_strength > 0.0;
  traj.nonlinear = cfg.nonlinear;

  const SplitStepper stepper(grid, params, cfg.dt, cfg.nonlinear);
  std::vector<double> damping;
  if (traj.sponge) {
    damping = sponge_profile(*grid, cfg.sponge_start);
    for (auto& d : damping) d = std::exp(-cfg.dt * cfg.sponge_strength * d);
  }

  const long total = step_count(cfg.t_end, cfg.dt);
  const double grad0 = std::sqrt(grad_sq(u0));
  Field u = u0;

  auto store = [&](long k) {
    const double t = t0 + static_cast<double>(k) * cfg.dt;
    traj.times.push_back(t);
    traj.records.push_back(record(t, u));
    if (cfg.keep_snapshots) traj.snapshots.push_back(u);
    return traj.records.back();
  };

  store(0);
  for (long k = 1; k <= total; ++k) {
    try {
      stepper.advance(u);
      if (!damping.empty())
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= damping[i];
    } catch (const NumericalError&) {
      traj.status = RunStatus::blowup_suspected;
      break;
    }
    traj.steps = k;
    if (k % cfg.snapshot_stride == 0 || k == total) {
      if (!u.all_finite()) {
        traj.status = RunStatus::blowup_suspected;
        break;
      }
      const auto rec = store(k);
      if (grad0 > 0.0 && std::sqrt(rec.grad_sq) > cfg.blowup_factor * grad0) {
        traj.status = RunStatus::blowup_suspected;
        break;
      }
    }
  }
  return traj;
}

Field free_propagate(const Field& u, double t, double max_dt) {
  u.check();
  if (t == 0.0) return u;
  if (!(max_dt > 0.0)) throw RangeError("max_dt must be positive");
  const long steps = step_count(t, max_dt);
  const FreeStepper stepper(u.grid, t / static_cast<double>(steps));
  Field out = u;
  for (long k = 0; k < steps; ++k) stepper.advance(out.values);
  return out;
}

double cauchy_defect(const Trajectory& traj, std::size_t last, int count) {
  if (count < 2) throw RangeError("a Cauchy window needs at least two snapshots");
  if (traj.snapshots.size() < static_cast<std::size_t>(count) || last >= traj.snapshots.size() ||
      last + 1 < static_cast<std::size_t>(count))
    throw RangeError("not enough stored snapshots for the requested window");
  if (traj.sponge) throw RangeError("scattering defect is meaningless with the sponge enabled");

  // ‖e^{-t_j Δ}u_j - e^{-t_k Δ}u_k‖_{H¹} = ‖e^{(t_k - t_j)Δ}u_j - u_k‖_{H¹}: the
  // discrete propagator is unitary and commutes with Δ_h.
  const std::size_t first = last + 1 - static_cast<std::size_t>(count);
  const FreeStepper stepper(traj.snapshots[first].grid, traj.dt);
  double defect = 0.0;
  for (std::size_t j = first; j < last; ++j) {
    Field v = traj.snapshots[j];
    long done = 0;
    for (std::size_t k = j + 1; k <= last; ++k) {
      const long target = std::lround((traj.times[k] - traj.times[j]) / traj.dt);
      for (; done < target; ++done) stepper.advance(v.values);
      defect = std::max(defect, h1_distance(v, traj.snapshots[k]));
    }
  }
  return defect;
}

ScatteringProfile scattering_profile(const Trajectory& traj, int count) {
  if (count < 3) throw RangeError("scattering profile needs at least three late snapshots");
  if (traj.snapshots.size() < static_cast<std::size_t>(count))
    throw RangeError("scattering profile needs at least three late snapshots");
  ScatteringProfile out;
  const std::size_t last = traj.snapshots.size() - 1;
  out.cauchy_defect = cauchy_defect(traj, last, count);
  const long steps = std::lround(traj.times[last] / traj.dt);
  const FreeStepper back(traj.snapshots[last].grid, -traj.dt);
  out.u_plus = traj.snapshots[last];
  for (long k = 0; k < steps; ++k) back.advance(out.u_plus.values);
  return out;
}

void write_snapshots_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "t,r,re,im\n" << std::setprecision(17);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& u = traj.snapshots[k];
    for (std::size_t i = 0; i < u.size(); ++i)
      out << traj.times[k] << ',' << u.grid->r[i] << ',' << u[i].real() << ',' << u[i].imag() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_checkpoint(const std::filesystem::path& path, double t, const Field& u) {
  Trajectory one;
  one.times = {t};
  one.snapshots = {u};
  write_snapshots_csv(one, path);
}

std::pair<double, Field> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "t,r,re,im") throw std::runtime_error(path.string() + ": expected header t,r,re,im");
  double t = 0.0;
  std::vector<double> rs;
  std::vector<cplx> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double cols[4];
    char sep = 0;
    row >> cols[0] >> sep >> cols[1] >> sep >> cols[2] >> sep >> cols[3];
    if (!row) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    if (rs.empty()) t = cols[0];
    else if (cols[0] != t) throw std::runtime_error(path.string() + ": checkpoint holds more than one time");
    rs.push_back(cols[1]);
    vals.emplace_back(cols[2], cols[3]);
  }
  if (rs.size() < 16) throw std::runtime_error(path.string() + ": too few rows");
  const double dr = 2.0 * rs.front();
  auto grid = build_grid(dr * static_cast<double>(rs.size()), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (std::abs(grid->r[i] - rs[i]) > 1e-9 * (1.0 + rs[i]))
      throw std::runtime_error(path.string() + ": r column is not a cell-centered grid");
  return {t, Field(grid, std::move(vals))};
}

}  // namespace inls
