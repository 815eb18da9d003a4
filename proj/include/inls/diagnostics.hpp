// Functionals, thresholds and Morawetz machinery evaluated on radial fields
// and trajectories.
#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "inls/evolution.hpp"
#include "inls/functionals.hpp"
#include "inls/groundstate.hpp"
#include "inls/record.hpp"

namespace inls {

/// Smooth radial cutoff: 1 on r ≤ R/2, 0 on r ≥ R, C^∞ and nonincreasing
/// in between. `power` selects χ_R (1) or χ_R² (2) where a weight is needed.
struct CutoffChi {
  double R = 1.0;
  int power = 1;

  double operator()(double r) const;
  double weight(double r) const;
};

/// Virial weight a(r): r² on r ≤ R, 3R r + const on r > 2R, joined on
/// (R, 2R] so that a is C³, a_r ≥ 0 and a_rr ≥ 0.
///
/// The bridge is built on a_rr = 2(1-s)²(1+2s), s = (r - R)/R, which takes
/// a_r from 2R to 3R. The outer constant is -2.3R² so that a is continuous;
/// only derivatives of a enter the action and its time derivative.
class MorawetzWeight {
 public:
  explicit MorawetzWeight(double R);

  double R() const { return R_; }
  double a(double r) const;
  double a_r(double r) const;
  double a_rr(double r) const;
  double a_rrr(double r) const;
  double a_rrrr(double r) const;
  /// Δa = a_rr + a_r / r.
  double lap_a(double r) const;
  /// Δ²a = a'''' + 2a'''/r - a''/r² + a'/r³.
  double bilap_a(double r) const;

 private:
  double R_;
};

MorawetzWeight build_morawetz_weight(double R);

/// M_a = 2∫∇a·Im(ū∇u) dx.
double morawetz_action(const Field& u, const MorawetzWeight& w);

struct MorawetzTerms {
  double t = 0.0;
  /// -∫Δ²a|u|², 4∫a_rr|∂_r u|², -(2p/(p+2))∫Δa|x|^{-b}|u|^{p+2},
  /// (4/(p+2))∫a_r ∂_r(|x|^{-b})|u|^{p+2}.
  std::array<double, 4> term{};
  double sum() const { return term[0] + term[1] + term[2] + term[3]; }
};

MorawetzTerms morawetz_derivative(const Field& u, const PhysParams& params, const MorawetzWeight& w);

/// ∫χ_R^power |u|².
double local_mass(const Field& u, const CutoffChi& chi);

/// ∫_{r ≤ R}|x|^{-b}|u|^{p+2} (sharp ball).
double ball_potential(const Field& u, const PhysParams& params, double R);

struct ThresholdReport {
  double mass_energy = 0.0;     ///< M(u0)^{1-s_p} E(u0)^{s_p}, NaN when E < 0
  double mass_energy_q = 0.0;   ///< same for Q
  bool energy_negative = false;
  bool below_mass_energy = false;
  double margin_mass_energy = 0.0;  ///< 1 - mass_energy / mass_energy_q

  double gradient = 0.0;        ///< ‖u0‖^{1-s_p}‖∇u0‖^{s_p}
  double gradient_q = 0.0;
  bool below_gradient = false;
  double margin_gradient = 0.0;

  std::optional<double> delta;
  bool below_strengthened = false;   ///< gradient < (1 - 2δ) gradient_q
  double margin_strengthened = 0.0;

  /// Scattering hypothesis: both products below (gradient only when E < 0).
  bool below() const { return energy_negative ? below_gradient : below_mass_energy && below_gradient; }
};

/// Relative margins smaller than this count as equality, so Q itself is not "below".
inline constexpr double kThresholdEqualityTol = 1e-10;

ThresholdReport threshold_check(const Field& u0, const PhysParams& params, const GroundState& gs,
                                std::optional<double> delta = std::nullopt);

/// ‖u‖^{1-s_p}‖∇u‖^{s_p}.
double gradient_product(const Field& u, const PhysParams& params);

/// max_i r_i^{1/2}|u_i| / ‖u‖_{H¹}.
double radial_sobolev_ratio(const Field& u);

struct CoercivityReport {
  double lhs = 0.0;         ///< ‖∇(χu)‖² - (p+b)/(p+2)∫|x|^{-b}|χu|^{p+2}
  double rhs = 0.0;         ///< ∫|x|^{-b}|u|^{p+2}
  std::optional<double> delta_prime;  ///< lhs / rhs, unset when rhs = 0
  double ball_product = 0.0;          ///< ‖χu‖^{1-s_p}‖∇(χu)‖^{s_p}
  double ball_product_bound = 0.0;    ///< (1 - δ)‖Q‖^{1-s_p}‖∇Q‖^{s_p}
  bool ball_below = false;
};

CoercivityReport coercivity_check(const Field& u, const PhysParams& params, const CutoffChi& chi,
                                  const GroundState& gs, double delta = 0.0);

struct PotentialGrowth {
  std::optional<double> beta_fit;  ///< unset for degenerate (all-zero) data
  std::vector<std::pair<double, double>> table;  ///< (T, ∫_0^T potential dt)
};

/// Trapezoid-cumulative potential and the log-log slope over the second half.
PotentialGrowth spacetime_potential_growth(const Trajectory& traj);

/// Running minimum over a trailing window of `window` entries.
std::vector<double> sliding_window_min(const std::vector<double>& values, std::size_t window);

/// Hook filling every DiagnosticsRecord field, including the action for `w`
/// and the local mass for `chi`.
DiagnosticsHook make_diagnostics_hook(const PhysParams& params, const MorawetzWeight& w, const CutoffChi& chi);

DiagnosticsRecord make_record(double t, const Field& u, const PhysParams& params, const MorawetzWeight& w,
                              const CutoffChi& chi);

/// Column order t,mass,energy,grad_sq,potential,morawetz_action,local_mass,h1_norm.
void write_records_csv(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path);
/// Columns t,term1,term2,term3,term4.
void write_morawetz_terms_csv(const std::vector<MorawetzTerms>& terms, const std::filesystem::path& path);

}  // namespace inls
