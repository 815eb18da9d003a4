#include "inls/params_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace inls {

PhysParams make_params(double p, double b) {
  if (!std::isfinite(p) || !std::isfinite(b)) throw RangeError("p and b must be finite");
  if (!(b > 0.0 && b < 1.0)) {
    std::ostringstream os;
    os << "b = " << b << " violates 0 < b < 1";
    throw RangeError(os.str());
  }
  if (!(p > 2.0 - b)) {
    std::ostringstream os;
    os << "p = " << p << " violates p > 2 - b = " << 2.0 - b;
    throw RangeError(os.str());
  }
  PhysParams out;
  out.p = p;
  out.b = b;
  out.s_p = 1.0 - (2.0 - b) / p;
  out.c_pdb = (p + b) / (p + 2.0 - (p + b));
  return out;
}

GridPtr build_grid(double r_max, std::size_t n) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw RangeError("r_max must be positive");
  if (n < 16) throw RangeError("grid needs at least 16 cells");
  auto g = std::make_shared<RadialGrid>();
  g->n = n;
  g->r_max = r_max;
  g->dr = r_max / static_cast<double>(n);
  g->r.resize(n);
  g->quad_w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g->r[i] = (static_cast<double>(i) + 0.5) * g->dr;
    g->quad_w[i] = 2.0 * std::numbers::pi * g->r[i] * g->dr;
  }
  return g;
}

Field::Field(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->n) throw std::invalid_argument("field length does not match grid");
}

bool Field::all_finite() const {
  for (const auto& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

void Field::check() const {
  if (!grid) throw NumericalError("field has no grid");
  if (values.size() != grid->n) throw NumericalError("field length does not match grid");
  if (!all_finite()) throw NumericalError("field contains non-finite values");
}

Field operator*(cplx s, const Field& f) {
  Field out = f;
  for (auto& z : out.values) z *= s;
  return out;
}

Field operator+(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Field conj(const Field& f) {
  Field out = f;
  for (auto& z : out.values) z = std::conj(z);
  return out;
}

double integrate(const RadialGrid& g, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) s += g.quad_w[i] * f[i];
  return s;
}

cplx inner(const Field& a, const Field& b) {
  const auto& w = a.grid->quad_w;
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::conj(a[i]) * b[i];
  return s;
}

double norm_sq(const Field& f) {
  const auto& w = f.grid->quad_w;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::norm(f[i]);
  return s;
}

LaplacianStencil laplacian_stencil(const RadialGrid& g) {
  const std::size_t n = g.n;
  LaplacianStencil st;
  st.lower.assign(n, 0.0);
  st.diag.assign(n, 0.0);
  st.upper.assign(n, 0.0);
  const double inv = 1.0 / (g.dr * g.dr);
  for (std::size_t i = 0; i < n; ++i) {
    const double rl = g.face(i);
    const double rr = g.face(i + 1);
    const double c = inv / g.r[i];
    st.lower[i] = i > 0 ? c * rl : 0.0;
    st.upper[i] = i + 1 < n ? c * rr : 0.0;
    // Outer ghost -u_{n-1} doubles the outgoing flux weight.
    st.diag[i] = -c * (rl + (i + 1 < n ? rr : 2.0 * rr));
  }
  return st;
}

void laplacian_radial(const RadialGrid& g, std::span<const cplx> in, std::span<cplx> out) {
  const std::size_t n = g.n;
  const double inv = 1.0 / (g.dr * g.dr);
  for (std::size_t i = 0; i < n; ++i) {
    const double rl = g.face(i);
    const double rr = g.face(i + 1);
    const cplx right = i + 1 < n ? in[i + 1] : -in[i];
    const cplx left = i > 0 ? in[i - 1] : in[i];
    out[i] = inv / g.r[i] * (rr * (right - in[i]) - rl * (in[i] - left));
  }
}

Field laplacian_radial(const Field& f) {
  f.check();
  Field out(f.grid);
  laplacian_radial(*f.grid, f.values, out.values);
  return out;
}

double grad_norm_sq(const Field& f) {
  const auto& g = *f.grid;
  const double twopi = 2.0 * std::numbers::pi;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.n; ++i) s += g.face(i + 1) * std::norm(f[i + 1] - f[i]);
  // half cell between the last center and the Dirichlet face
  s += 2.0 * g.face(g.n) * std::norm(f[g.n - 1]);
  return twopi * s / g.dr;
}

std::vector<double> singular_weight(const RadialGrid& g, double b) {
  if (!(b >= 0.0 && b < 2.0)) throw RangeError("singular weight needs 0 <= b < 2");
  std::vector<double> w(g.n);
  for (std::size_t i = 0; i < g.n; ++i) w[i] = std::pow(g.r[i], -b);
  return w;
}

std::vector<double> singular_weight_averaged(const RadialGrid& g, double b) {
  if (!(b >= 0.0 && b < 2.0)) throw RangeError("singular weight needs 0 <= b < 2");
  std::vector<double> w(g.n);
  const double e = 2.0 - b;
  for (std::size_t i = 0; i < g.n; ++i)
    w[i] = (std::pow(g.face(i + 1), e) - std::pow(g.face(i), e)) / (e * g.r[i] * g.dr);
  return w;
}

}  // namespace inls
