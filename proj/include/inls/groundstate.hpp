// Ground state of -ΔQ + Q - |x|^{-b} Q^{p+1} = 0 and the sharp
// Gagliardo-Nirenberg constant built from it.
#pragma once

#include <filesystem>
#include <vector>

#include "inls/params_grid.hpp"

namespace inls {

struct GroundState {
  Field profile;             ///< real, nonnegative, stored as complex
  double residual = 0.0;     ///< ‖-ΔQ + Q - |x|^{-b}Q^{p+1}‖_{L²}
  double mass_Q = 0.0;       ///< ‖Q‖²
  double grad_Q = 0.0;       ///< ‖∇Q‖²
  double pot_Q = 0.0;        ///< ∫|x|^{-b}Q^{p+2}
  double c0 = 0.0;           ///< sharp G-N constant
  double multiplier = 0.0;   ///< final stabilizing factor, → 1 at convergence
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Raised when the stabilized iteration stalls or blows up.
class GroundStateError : public NumericalError {
 public:
  GroundStateError(const std::string& what, double last_residual, int iterations)
      : NumericalError(what), last_residual(last_residual), iterations(iterations) {}
  double last_residual;
  int iterations;
};

/// Petviashvili iteration Q ← m^γ (1 - Δ)^{-1}(|x|^{-b}Q^{p+1}) with
/// m = <Q,(1-Δ)Q> / <Q,|x|^{-b}Q^{p+1}> and γ = (p+1)/p, started from
/// e^{-r²}. Stops when the elliptic residual drops to tol.
GroundState solve_ground_state(const PhysParams& params, const GridPtr& grid, double tol = 1e-10,
                               int max_iter = 500);

/// Elliptic residual of an arbitrary real profile.
double elliptic_residual(const Field& q, const PhysParams& params);

/// C₀ = C^{(4 - 2p - 2b)/4} (p + 2) / ((p + b) ‖Q‖^p).
double sharp_gn_constant(const PhysParams& params, const GroundState& gs);

/// ∫|x|^{-b}|f|^{p+2} / (C₀ ‖∇f‖^{p+b} ‖f‖^{2-b}); equals 1 at Q.
double gn_ratio(const Field& f, const PhysParams& params, double c0);

/// CSV with header "r,Q" and 17 significant digits.
void save_ground_state_csv(const GroundState& gs, const std::filesystem::path& path);
/// Reads a CSV written by save_ground_state_csv and recomputes every derived quantity.
GroundState load_ground_state_csv(const std::filesystem::path& path, const PhysParams& params);

/// Fills residual, norms and c0 for a given profile.
GroundState describe_ground_state(Field profile, const PhysParams& params);

}  // namespace inls
