#include "inls/groundstate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "inls/functionals.hpp"
#include "inls/tridiag.hpp"

namespace inls {

namespace {

std::vector<double> nonlinear_source(std::span<const double> q, std::span<const double> weight, double p) {
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = weight[i] * abs_pow(q[i] * q[i], p) * q[i];
  return out;
}

Field to_field(const GridPtr& grid, std::span<const double> q) {
  Field f(grid);
  for (std::size_t i = 0; i < q.size(); ++i) f[i] = q[i];
  return f;
}

}  // namespace

double elliptic_residual(const Field& q, const PhysParams& params) {
  const auto weight = singular_weight_averaged(*q.grid, params.b);
  Field lap = laplacian_radial(q);
  Field res(q.grid);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = q[i].real();
    res[i] = -lap[i] + q[i] - weight[i] * abs_pow(v * v, params.p) * v;
  }
  return std::sqrt(norm_sq(res));
}

GroundState describe_ground_state(Field profile, const PhysParams& params) {
  GroundState gs;
  gs.residual = elliptic_residual(profile, params);
  gs.mass_Q = mass(profile);
  gs.grad_Q = grad_sq(profile);
  gs.pot_Q = potential(profile, params);
  gs.profile = std::move(profile);
  gs.c0 = sharp_gn_constant(params, gs);
  gs.multiplier = 1.0;
  return gs;
}

GroundState solve_ground_state(const PhysParams& params, const GridPtr& grid, double tol, int max_iter) {
  if (!(tol > 0.0)) throw RangeError("tolerance must be positive");
  const RadialGrid& g = *grid;
  const std::size_t n = g.n;
  const double p = params.p;
  const double gamma = (p + 1.0) / p;
  const auto weight = singular_weight_averaged(g, params.b);

  // (1 - Δ_h) and its factorization, reused every iteration.
  auto st = laplacian_stencil(g);
  std::vector<double> lower(n), diag(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = -st.lower[i];
    diag[i] = 1.0 - st.diag[i];
    upper[i] = -st.upper[i];
  }
  const TridiagonalLU<double> helmholtz(lower, diag, upper);

  auto apply_helmholtz = [&](std::span<const double> q) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * q[i];
      if (i > 0) v += lower[i] * q[i - 1];
      if (i + 1 < n) v += upper[i] * q[i + 1];
      out[i] = v;
    }
    return out;
  };
  auto dot = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += g.quad_w[i] * a[i] * b[i];
    return s;
  };

  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = std::exp(-g.r[i] * g.r[i]);

  GroundState gs;
  double res = 0.0;
  double m = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    auto src = nonlinear_source(q, weight, p);
    auto hq = apply_helmholtz(q);
    const double num = dot(q, hq);
    const double den = dot(q, src);
    if (!(den > 0.0) || !std::isfinite(num)) throw GroundStateError("ground-state iteration lost positivity", res, it);
    m = num / den;
    const double factor = std::pow(m, gamma);
    helmholtz.solve(std::span<double>(src));
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = std::abs(factor * src[i]);
      peak = std::max(peak, q[i]);
    }
    if (!std::isfinite(peak) || peak > 1e12) throw GroundStateError("ground-state iteration diverged", res, it);

    // Residual -ΔQ + Q - |x|^{-b}Q^{p+1} = (1 - Δ)Q - source(Q).
    auto hq_new = apply_helmholtz(q);
    auto src_new = nonlinear_source(q, weight, p);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = hq_new[i] - src_new[i];
      r2 += g.quad_w[i] * d * d;
    }
    res = std::sqrt(r2);
    gs.residual_history.push_back(res);
    if (res <= tol) {
      Field profile = to_field(grid, q);
      GroundState out = describe_ground_state(std::move(profile), params);
      out.multiplier = m;
      out.iterations = it;
      out.residual_history = std::move(gs.residual_history);
      return out;
    }
  }
  std::ostringstream os;
  os << "ground-state iteration did not converge in " << max_iter << " iterations (residual " << res << ")";
  throw GroundStateError(os.str(), res, max_iter);
}

double sharp_gn_constant(const PhysParams& params, const GroundState& gs) {
  const double p = params.p;
  const double b = params.b;
  const double exponent = (4.0 - 2.0 * p - 2.0 * b) / 4.0;
  const double norm_q = std::sqrt(gs.mass_Q);
  return std::pow(params.c_pdb, exponent) * (p + 2.0) / ((p + b) * std::pow(norm_q, p));
}

double gn_ratio(const Field& f, const PhysParams& params, double c0) {
  const double m = mass(f);
  if (!(m > 0.0)) throw RangeError("gn_ratio of a zero field");
  const double k = grad_sq(f);
  const double pot = potential(f, params);
  const double p = params.p;
  const double b = params.b;
  return pot / (c0 * std::pow(k, 0.5 * (p + b)) * std::pow(m, 0.5 * (2.0 - b)));
}

void save_ground_state_csv(const GroundState& gs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "r,Q\n" << std::setprecision(17);
  const auto& g = *gs.profile.grid;
  for (std::size_t i = 0; i < g.n; ++i) out << g.r[i] << ',' << gs.profile[i].real() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GroundState load_ground_state_csv(const std::filesystem::path& path, const PhysParams& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "r,Q") throw std::runtime_error(path.string() + ": expected header r,Q");
  std::vector<double> rs, qs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    rs.push_back(std::stod(line.substr(0, comma)));
    qs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (rs.size() < 16) throw std::runtime_error(path.string() + ": too few rows");
  const double dr = 2.0 * rs.front();
  auto grid = build_grid(dr * static_cast<double>(rs.size()), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (std::abs(grid->r[i] - rs[i]) > 1e-9 * (1.0 + rs[i]))
      throw std::runtime_error(path.string() + ": r column is not a cell-centered grid");
  return describe_ground_state(to_field(grid, qs), params);
}

}  // namespace inls
