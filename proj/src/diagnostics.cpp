#include "inls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

namespace inls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smooth_step_exp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double relative_margin(double value, double reference) { return 1.0 - value / reference; }

}  // namespace

double CutoffChi::operator()(double r) const {
  const double half = 0.5 * R;
  if (r <= half) return 1.0;
  if (r >= R) return 0.0;
  const double s = (r - half) / half;
  const double up = smooth_step_exp(1.0 - s);
  return up / (up + smooth_step_exp(s));
}

double CutoffChi::weight(double r) const {
  const double c = (*this)(r);
  return power == 2 ? c * c : c;
}

MorawetzWeight::MorawetzWeight(double R) : R_(R) {
  if (!(R > 0.0)) throw RangeError("Morawetz radius must be positive");
}

MorawetzWeight build_morawetz_weight(double R) { return MorawetzWeight(R); }

double MorawetzWeight::a(double r) const {
  if (r <= R_) return r * r;
  if (r > 2.0 * R_) return 3.0 * R_ * r - 2.3 * R_ * R_;
  const double s = (r - R_) / R_;
  const double s2 = s * s;
  return R_ * R_ * (1.0 + 2.0 * s + s2 - 0.5 * s2 * s2 + 0.2 * s2 * s2 * s);
}

double MorawetzWeight::a_r(double r) const {
  if (r <= R_) return 2.0 * r;
  if (r > 2.0 * R_) return 3.0 * R_;
  const double s = (r - R_) / R_;
  const double s2 = s * s;
  return R_ * (2.0 + 2.0 * s - 2.0 * s2 * s + s2 * s2);
}

double MorawetzWeight::a_rr(double r) const {
  if (r <= R_) return 2.0;
  if (r > 2.0 * R_) return 0.0;
  const double s = (r - R_) / R_;
  return 2.0 * (1.0 - s) * (1.0 - s) * (1.0 + 2.0 * s);
}

double MorawetzWeight::a_rrr(double r) const {
  if (r <= R_ || r > 2.0 * R_) return 0.0;
  const double s = (r - R_) / R_;
  return -12.0 * s * (1.0 - s) / R_;
}

double MorawetzWeight::a_rrrr(double r) const {
  if (r <= R_ || r > 2.0 * R_) return 0.0;
  const double s = (r - R_) / R_;
  return (24.0 * s - 12.0) / (R_ * R_);
}

double MorawetzWeight::lap_a(double r) const { return a_rr(r) + a_r(r) / r; }

double MorawetzWeight::bilap_a(double r) const {
  if (r <= R_) return 0.0;
  return a_rrrr(r) + 2.0 * a_rrr(r) / r - a_rr(r) / (r * r) + a_r(r) / (r * r * r);
}

namespace {

// ∫_{cell i} Δ²a r dr / (r_i dr): Δ²a jumps at R and 2R, so each cell is
// split there and integrated with two-point Gauss-Legendre per piece.
std::vector<double> cell_averaged_bilap(const RadialGrid& g, const MorawetzWeight& w) {
  const double gauss = 0.5 / std::sqrt(3.0);
  std::vector<double> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double lo = g.face(i), hi = g.face(i + 1);
    double cuts[4] = {lo, hi, hi, hi};
    int m = 1;
    for (double c : {w.R(), 2.0 * w.R()})
      if (c > lo && c < hi) cuts[m++] = c;
    cuts[m] = hi;
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      const double mid = 0.5 * (a + b), len = b - a;
      for (double x : {mid - gauss * len, mid + gauss * len}) s += 0.5 * len * w.bilap_a(x) * x;
    }
    out[i] = s / (g.r[i] * g.dr);
  }
  return out;
}

}  // namespace

double morawetz_action(const Field& u, const MorawetzWeight& w) {
  const auto& g = *u.grid;
  // Face values: Im(ū_f (u_{i+1} - u_i)/dr) with ū_f the face average
  // reduces to Im(ū_i u_{i+1})/dr. The Dirichlet face contributes nothing.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.n; ++i) {
    const double rf = g.face(i + 1);
    s += rf * w.a_r(rf) * std::imag(std::conj(u[i]) * u[i + 1]);
  }
  return 2.0 * kTwoPi * s;
}

MorawetzTerms morawetz_derivative(const Field& u, const PhysParams& params, const MorawetzWeight& w) {
  const auto& g = *u.grid;
  const auto vw = singular_weight_averaged(g, params.b);
  const double p = params.p;
  MorawetzTerms out;

  const auto bilap_w = cell_averaged_bilap(g, w);
  double bilap = 0.0, pot_lap = 0.0, pot_grad = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double r = g.r[i];
    const double m2 = std::norm(u[i]);
    const double dens = vw[i] * abs_pow(m2, p + 2.0);
    bilap += g.quad_w[i] * bilap_w[i] * m2;
    pot_lap += g.quad_w[i] * w.lap_a(r) * dens;
    // a_r ∂_r(r^{-b}) = -b (a_r / r) r^{-b}
    pot_grad += g.quad_w[i] * (-params.b) * (w.a_r(r) / r) * dens;
  }

  double kin = 0.0;
  for (std::size_t i = 0; i + 1 < g.n; ++i) {
    const double rf = g.face(i + 1);
    kin += rf * w.a_rr(rf) * std::norm(u[i + 1] - u[i]);
  }
  kin += 2.0 * g.r_max * w.a_rr(g.r_max) * std::norm(u[g.n - 1]);
  kin *= kTwoPi / g.dr;

  out.term = {-bilap, 4.0 * kin, -(2.0 * p / (p + 2.0)) * pot_lap, (4.0 / (p + 2.0)) * pot_grad};
  return out;
}

double local_mass(const Field& u, const CutoffChi& chi) {
  const auto& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) s += g.quad_w[i] * chi.weight(g.r[i]) * std::norm(u[i]);
  return s;
}

double ball_potential(const Field& u, const PhysParams& params, double R) {
  const auto& g = *u.grid;
  const auto vw = singular_weight_averaged(g, params.b);
  double s = 0.0;
  for (std::size_t i = 0; i < g.n && g.r[i] <= R; ++i)
    s += g.quad_w[i] * vw[i] * abs_pow(std::norm(u[i]), params.p + 2.0);
  return s;
}

double gradient_product(const Field& u, const PhysParams& params) {
  const double s = params.s_p;
  return std::pow(mass(u), 0.5 * (1.0 - s)) * std::pow(grad_sq(u), 0.5 * s);
}

ThresholdReport threshold_check(const Field& u0, const PhysParams& params, const GroundState& gs,
                                std::optional<double> delta) {
  if (u0.grid->n != gs.profile.grid->n || u0.grid->r_max != gs.profile.grid->r_max)
    throw RangeError("threshold_check needs u0 and Q on the same grid");
  const double s = params.s_p;
  ThresholdReport rep;

  const double e_q = energy(gs.profile, params);
  const double e_u = energy(u0, params);
  rep.mass_energy_q = std::pow(gs.mass_Q, 1.0 - s) * std::pow(e_q, s);
  rep.energy_negative = e_u < 0.0;
  if (rep.energy_negative) {
    rep.mass_energy = std::numeric_limits<double>::quiet_NaN();
    rep.margin_mass_energy = std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.mass_energy = std::pow(mass(u0), 1.0 - s) * std::pow(e_u, s);
    rep.margin_mass_energy = relative_margin(rep.mass_energy, rep.mass_energy_q);
    rep.below_mass_energy = rep.margin_mass_energy > kThresholdEqualityTol;
  }

  rep.gradient = gradient_product(u0, params);
  rep.gradient_q = std::pow(gs.mass_Q, 0.5 * (1.0 - s)) * std::pow(gs.grad_Q, 0.5 * s);
  rep.margin_gradient = relative_margin(rep.gradient, rep.gradient_q);
  rep.below_gradient = rep.margin_gradient > kThresholdEqualityTol;

  if (delta) {
    rep.delta = delta;
    const double bound = (1.0 - 2.0 * *delta) * rep.gradient_q;
    rep.margin_strengthened = relative_margin(rep.gradient, bound);
    rep.below_strengthened = rep.margin_strengthened > kThresholdEqualityTol;
  }
  return rep;
}

double radial_sobolev_ratio(const Field& u) {
  const double h1 = h1_norm(u);
  if (!(h1 > 0.0)) throw RangeError("radial_sobolev_ratio of a zero field");
  double peak = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) peak = std::max(peak, std::sqrt(u.grid->r[i]) * std::abs(u[i]));
  return peak / h1;
}

CoercivityReport coercivity_check(const Field& u, const PhysParams& params, const CutoffChi& chi,
                                  const GroundState& gs, double delta) {
  Field cu = u;
  for (std::size_t i = 0; i < cu.size(); ++i) cu[i] *= chi(u.grid->r[i]);
  CoercivityReport rep;
  const double cut_grad = grad_sq(cu);
  rep.lhs = cut_grad - (params.b + params.p) / (params.p + 2.0) * potential(cu, params);
  rep.rhs = potential(u, params);
  if (rep.rhs > 0.0) rep.delta_prime = rep.lhs / rep.rhs;
  const double s = params.s_p;
  rep.ball_product = std::pow(mass(cu), 0.5 * (1.0 - s)) * std::pow(cut_grad, 0.5 * s);
  rep.ball_product_bound = (1.0 - delta) * std::pow(gs.mass_Q, 0.5 * (1.0 - s)) * std::pow(gs.grad_Q, 0.5 * s);
  rep.ball_below = rep.ball_product < rep.ball_product_bound;
  return rep;
}

PotentialGrowth spacetime_potential_growth(const Trajectory& traj) {
  const auto& rec = traj.records;
  if (rec.size() < 10) throw RangeError("potential growth fit needs at least 10 snapshots");
  PotentialGrowth out;
  const double t0 = rec.front().t;
  double cum = 0.0;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    cum += 0.5 * (rec[k].t - rec[k - 1].t) * (rec[k].potential + rec[k - 1].potential);
    out.table.emplace_back(rec[k].t - t0, cum);
  }
  const double t_half = 0.5 * (rec.back().t - t0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [T, c] : out.table) {
    if (T < t_half || !(c > 0.0)) continue;
    const double x = std::log(T), y = std::log(c);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count >= 2) {
    const double denom = count * sxx - sx * sx;
    if (denom > 0.0) out.beta_fit = (count * sxy - sx * sy) / denom;
  }
  return out;
}

std::vector<double> sliding_window_min(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw RangeError("window must be positive");
  std::vector<double> out(values.size());
  std::deque<std::size_t> idx;
  for (std::size_t k = 0; k < values.size(); ++k) {
    while (!idx.empty() && values[idx.back()] >= values[k]) idx.pop_back();
    idx.push_back(k);
    if (idx.front() + window <= k) idx.pop_front();
    out[k] = values[idx.front()];
  }
  return out;
}

DiagnosticsRecord make_record(double t, const Field& u, const PhysParams& params, const MorawetzWeight& w,
                              const CutoffChi& chi) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = mass(u);
  r.grad_sq = grad_sq(u);
  r.potential = potential(u, params);
  r.energy = 0.5 * r.grad_sq - r.potential / (params.p + 2.0);
  r.morawetz_action = morawetz_action(u, w);
  r.local_mass = local_mass(u, chi);
  r.h1_norm = std::sqrt(r.mass + r.grad_sq);
  return r;
}

DiagnosticsHook make_diagnostics_hook(const PhysParams& params, const MorawetzWeight& w, const CutoffChi& chi) {
  return [params, w, chi](double t, const Field& u) { return make_record(t, u, params, w, chi); };
}

void write_records_csv(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "t,mass,energy,grad_sq,potential,morawetz_action,local_mass,h1_norm\n" << std::setprecision(17);
  for (const auto& r : records)
    out << r.t << ',' << r.mass << ',' << r.energy << ',' << r.grad_sq << ',' << r.potential << ','
        << r.morawetz_action << ',' << r.local_mass << ',' << r.h1_norm << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_morawetz_terms_csv(const std::vector<MorawetzTerms>& terms, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "t,term1,term2,term3,term4\n" << std::setprecision(17);
  for (const auto& m : terms)
    out << m.t << ',' << m.term[0] << ',' << m.term[1] << ',' << m.term[2] << ',' << m.term[3] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace inls
