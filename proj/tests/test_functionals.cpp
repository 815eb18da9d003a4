#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace inls;
using inls::test::gaussian;
using inls::test::random_smooth;

namespace {

// 2π∫ r^{1-b} e^{-(p+2)r²/2} dr in closed form.
double gaussian_potential(double p, double b) {
  const double alpha = 0.5 * (p + 2.0), k = 1.0 - 0.5 * b;
  return M_PI * std::tgamma(k) * std::pow(alpha, -k);
}

}  // namespace

TEST(Functionals, ZeroField) {
  const auto g = build_grid(10.0, 128);
  const auto pp = make_params(2.0, 0.5);
  const Field z(g);
  EXPECT_EQ(mass(z), 0.0);
  EXPECT_EQ(grad_sq(z), 0.0);
  EXPECT_EQ(potential(z, pp), 0.0);
  EXPECT_EQ(energy(z, pp), 0.0);
}

TEST(Functionals, GaussianOracles) {
  const auto g = build_grid(20.0, 32768);
  const auto pp = make_params(2.0, 0.5);
  const Field u = gaussian(g, 1.0);
  EXPECT_NEAR(mass(u), M_PI, 1e-6);
  EXPECT_NEAR(0.5 * grad_sq(u), 0.5 * M_PI, 1e-6);
  EXPECT_NEAR(potential(u, pp), gaussian_potential(2.0, 0.5), 1e-6);
  // The printed closed form for (2, 0.5).
  EXPECT_NEAR(gaussian_potential(2.0, 0.5), M_PI * std::tgamma(0.75) * std::pow(2.0, 0.75) / std::pow(4.0, 0.75),
              1e-14);
}

TEST(Functionals, PotentialConvergesAtSecondOrderForLargeB) {
  // The cell-averaged weight keeps second order even for b close to 1.
  const auto pp = make_params(2.5, 0.8);
  double prev = 0.0;
  for (std::size_t n : {1024u, 2048u, 4096u}) {
    const double err = std::abs(potential(gaussian(build_grid(20.0, n), 1.0), pp) - gaussian_potential(2.5, 0.8));
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 3.5);
    }
    prev = err;
  }
}

TEST(Functionals, DefinitionalConsistency) {
  const auto g = build_grid(15.0, 1024);
  const auto pp = make_params(3.0, 0.3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field u = random_smooth(g, seed);
    const double m = mass(u), k = grad_sq(u), pot = potential(u, pp);
    EXPECT_GE(m, 0.0);
    EXPECT_GE(pot, 0.0);
    EXPECT_NEAR(h1_norm(u) * h1_norm(u), m + k, 1e-12 * (m + k));
    EXPECT_NEAR(energy(u, pp), 0.5 * k - pot / (pp.p + 2.0), 1e-12 * (k + pot));
    EXPECT_NEAR(grad_sq(u), grad_norm_sq(u), 1e-12 * k);
  }
}

TEST(Functionals, H1DistanceIsANorm) {
  const auto g = build_grid(15.0, 512);
  const Field a = random_smooth(g, 1), b = random_smooth(g, 2);
  EXPECT_EQ(h1_distance(a, a), 0.0);
  EXPECT_NEAR(h1_distance(a, b), h1_distance(b, a), 1e-14);
  EXPECT_NEAR(h1_distance(a, Field(g)), h1_norm(a), 1e-12);
}

TEST(Functionals, MassOfGroundStateMatchesSolver) {
  const auto& gs = inls::test::cached_ground_state(2.0, 0.5, 30.0, 4096);
  EXPECT_EQ(mass(gs.profile), gs.mass_Q);
}

TEST(Functionals, AbsPowFastPaths) {
  EXPECT_EQ(abs_pow(9.0, 2.0), 9.0);
  EXPECT_EQ(abs_pow(9.0, 4.0), 81.0);
  EXPECT_NEAR(abs_pow(9.0, 3.0), 27.0, 1e-12);
  EXPECT_NEAR(abs_pow(9.0, 4.5), std::pow(3.0, 4.5), 1e-10);
}
