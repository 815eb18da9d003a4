// Scalar functionals of a radial field: mass, kinetic and potential parts,
// energy. All of them use the same midpoint quadrature against 2πr dr.
#pragma once

#include <cmath>
#include <vector>

#include "inls/params_grid.hpp"

namespace inls {

/// |z|^p evaluated from |z|² (no pow call for p = 2 or 4).
inline double abs_pow(double abs_sq, double p) {
  if (p == 2.0) return abs_sq;
  if (p == 4.0) return abs_sq * abs_sq;
  return std::pow(abs_sq, 0.5 * p);
}

/// M(u) = ∫|u|².
double mass(const Field& u);

/// ‖∇u‖² = ∫|∂_r u|², consistent with laplacian_radial.
double grad_sq(const Field& u);

/// ∫|x|^{-b}|u|^{p+2}, with the weight r_i^{-b} supplied or built on demand.
double potential(const Field& u, const PhysParams& params);
double potential(const Field& u, const PhysParams& params, const std::vector<double>& weight);

/// E(u) = ½‖∇u‖² - ∫|x|^{-b}|u|^{p+2} / (p+2).
double energy(const Field& u, const PhysParams& params);

/// sqrt(M(u) + ‖∇u‖²).
double h1_norm(const Field& u);

/// H¹ distance between two fields on the same grid.
double h1_distance(const Field& a, const Field& b);

}  // namespace inls
