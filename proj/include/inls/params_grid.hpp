// Physical parameters, the cell-centered radial mesh and the discrete
// operators shared by every other part of the library.
//
// The spatial dimension is fixed to two. Radial functions are sampled at
// cell centers r_i = (i + 1/2) dr, so the singular weight |x|^{-b} is never
// evaluated at the origin.
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace inls {

using cplx = std::complex<double>;

/// Raised when (p, b) or a grid request falls outside the admissible range.
class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exponents of i u_t + Δu + |x|^{-b}|u|^p u = 0 in two dimensions.
struct PhysParams {
  double p = 0.0;
  double b = 0.0;
  /// Scaling-critical regularity 1 - (2 - b)/p.
  double s_p = 0.0;
  /// (p + b) / (p + 2 - (p + b)), the d = 2 specialization of C_{p,d,b}.
  double c_pdb = 0.0;
};

/// Validates 0 < b < 1 and p > 2 - b and fills the derived constants.
PhysParams make_params(double p, double b);

struct RadialGrid {
  std::size_t n = 0;
  double r_max = 0.0;
  double dr = 0.0;
  std::vector<double> r;       ///< cell centers
  std::vector<double> quad_w;  ///< 2π r_i dr

  /// Face radius between cell i-1 and cell i (face 0 is the origin, face n is r_max).
  double face(std::size_t i) const { return static_cast<double>(i) * dr; }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr build_grid(double r_max, std::size_t n);

/// Complex radial profile sampled on a grid.
struct Field {
  GridPtr grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), values(grid->n, cplx{}) {}
  Field(GridPtr g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const;
  /// Throws NumericalError on NaN/Inf or a length mismatch with the grid.
  void check() const;
};

/// Samples a real profile f(r) at the cell centers.
template <class F>
Field sample(const GridPtr& grid, F&& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid->n; ++i) out[i] = cplx(f(grid->r[i]));
  return out;
}

Field operator*(cplx s, const Field& f);
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field conj(const Field& f);

/// ∫ f dx over the disc of radius r_max (midpoint rule against 2πr dr).
double integrate(const RadialGrid& g, std::span<const double> f);
/// Discrete L² inner product <a, b> = ∫ conj(a) b dx.
cplx inner(const Field& a, const Field& b);
double norm_sq(const Field& f);

/// Conservative second-order radial Laplacian u_rr + u_r / r.
///
/// Face fluxes r_{i+1/2}(u_{i+1} - u_i)/dr; the flux through the origin is
/// zero (mirror ghost) and the ghost beyond r_max is -u_{n-1} (Dirichlet at
/// the outer face). The operator is symmetric in the quadrature inner
/// product.
Field laplacian_radial(const Field& f);
void laplacian_radial(const RadialGrid& g, std::span<const cplx> in, std::span<cplx> out);

/// Tridiagonal coefficients of the discrete Laplacian, row i reads
/// lower[i] u_{i-1} + diag[i] u_i + upper[i] u_{i+1}.
struct LaplacianStencil {
  std::vector<double> lower, diag, upper;
};
LaplacianStencil laplacian_stencil(const RadialGrid& g);

/// ∫|∂_r f|² dx from face differences; equals -<f, Δ_h f>.
double grad_norm_sq(const Field& f);

/// r_i^{-b} per cell.
std::vector<double> singular_weight(const RadialGrid& g, double b);

/// Cell average of r^{-b} against the 2D measure,
/// ∫_{cell} r^{-b} r dr / (r_i dr). Used by every potential-type integral
/// and by the nonlinearity: it integrates r^{-b} times a cellwise constant
/// exactly, which keeps the origin singularity from degrading accuracy.
std::vector<double> singular_weight_averaged(const RadialGrid& g, double b);

}  // namespace inls
