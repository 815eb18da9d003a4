#include "inls/functionals.hpp"

namespace inls {

double mass(const Field& u) { return norm_sq(u); }

double grad_sq(const Field& u) { return grad_norm_sq(u); }

double potential(const Field& u, const PhysParams& params, const std::vector<double>& weight) {
  const auto& w = u.grid->quad_w;
  const double q = params.p + 2.0;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * weight[i] * abs_pow(std::norm(u[i]), q);
  return s;
}

double potential(const Field& u, const PhysParams& params) {
  return potential(u, params, singular_weight_averaged(*u.grid, params.b));
}

double energy(const Field& u, const PhysParams& params) {
  return 0.5 * grad_sq(u) - potential(u, params) / (params.p + 2.0);
}

double h1_norm(const Field& u) { return std::sqrt(mass(u) + grad_sq(u)); }

double h1_distance(const Field& a, const Field& b) { return h1_norm(a - b); }

}  // namespace inls
