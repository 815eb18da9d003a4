// Time integration of i u_t + Δu + |x|^{-b}|u|^p u = 0 for radial data.
//
// One step is Strang splitting: half a step of the exact nonlinear phase
// rotation, a Crank-Nicolson step of the free equation, another half
// nonlinear step. Both substeps are unitary in the quadrature inner
// product, so the discrete mass is conserved to rounding.
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "inls/params_grid.hpp"
#include "inls/record.hpp"
#include "inls/tridiag.hpp"

namespace inls {

struct EvolveConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  double sponge_strength = 0.0;
  double sponge_start = 0.0;
  int snapshot_stride = 10;
  /// Stop once ‖∇u‖ exceeds this multiple of its initial value.
  double blowup_factor = 1e3;
  /// Off turns the run into the free Schrödinger flow.
  bool nonlinear = true;
  bool keep_snapshots = true;

  void validate(const RadialGrid& grid) const;
};

enum class RunStatus { completed, blowup_suspected };

const char* to_string(RunStatus s);

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::vector<DiagnosticsRecord> records;
  RunStatus status = RunStatus::completed;
  double dt = 0.0;
  bool sponge = false;
  bool nonlinear = true;
  long steps = 0;
};

using DiagnosticsHook = std::function<DiagnosticsRecord(double t, const Field& u)>;

/// Crank-Nicolson propagator for the free equation with a fixed step.
class FreeStepper {
 public:
  FreeStepper(const GridPtr& grid, double dt);
  void advance(std::span<cplx> u) const;
  double dt() const { return dt_; }

 private:
  GridPtr grid_;
  double dt_;
  LaplacianStencil stencil_;
  TridiagonalLU<cplx> implicit_;
  std::vector<cplx> offset_lower_, offset_diag_, offset_upper_;
};

/// Strang-split integrator bound to one grid, parameter set and step size.
class SplitStepper {
 public:
  SplitStepper(const GridPtr& grid, const PhysParams& params, double dt, bool nonlinear = true);
  /// One step in place. Throws NumericalError on a non-finite result.
  void advance(Field& u) const;
  double dt() const { return linear_.dt(); }

 private:
  void rotate(std::span<cplx> u, double h) const;

  PhysParams params_;
  FreeStepper linear_;
  std::vector<double> weight_;
  bool nonlinear_;
};

/// One Strang step. dt may be negative (exact inverse of the step with -dt).
Field step(const Field& u, const PhysParams& params, double dt, bool nonlinear = true);

/// Smooth ramp σ(r) ∈ [0, 1], zero below sponge_start and one at r_max.
std::vector<double> sponge_profile(const RadialGrid& grid, double sponge_start);

/// Evolves u0 from t0 to t0 + t_end. The hook is called in step order on
/// every stored snapshot; when empty, a record with mass, energy, gradient,
/// potential and H¹ norm is produced.
Trajectory evolve(const Field& u0, const PhysParams& params, const EvolveConfig& cfg,
                  const DiagnosticsHook& hook = {}, double t0 = 0.0);

/// e^{itΔ_h} by Crank-Nicolson steps of size at most max_dt.
Field free_propagate(const Field& u, double t, double max_dt = 1e-2);

struct ScatteringProfile {
  Field u_plus;
  double cauchy_defect = 0.0;
};

/// v_k = e^{-t_k Δ} u(t_k) for the last `count` snapshots; returns the latest
/// v and the largest pairwise H¹ distance between them.
ScatteringProfile scattering_profile(const Trajectory& traj, int count = 3);

/// Cauchy defect of the window of `count` snapshots ending at snapshot `last`.
double cauchy_defect(const Trajectory& traj, std::size_t last, int count);

/// CSV rows t,r,re,im for each stored snapshot.
void write_snapshots_csv(const Trajectory& traj, const std::filesystem::path& path);

void save_checkpoint(const std::filesystem::path& path, double t, const Field& u);
/// Returns the stored time; the field is rebuilt on a grid matching the file.
std::pair<double, Field> load_checkpoint(const std::filesystem::path& path);

}  // namespace inls
