#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"

using namespace inls;
using inls::test::cached_ground_state;
using inls::test::gaussian;
using inls::test::random_smooth;

namespace {

const PhysParams kP = make_params(2.0, 0.5);

const GroundState& q() { return cached_ground_state(2.0, 0.5, 30.0, 2048); }

}  // namespace

TEST(Cutoff, ShapeAndMonotonicity) {
  const CutoffChi chi{10.0, 1};
  EXPECT_EQ(chi(0.1), 1.0);
  EXPECT_EQ(chi(5.0), 1.0);
  EXPECT_EQ(chi(10.0), 0.0);
  EXPECT_EQ(chi(30.0), 0.0);
  double prev = 1.0;
  for (double r = 5.0; r <= 10.0; r += 0.01) {
    EXPECT_LE(chi(r), prev + 1e-15);
    prev = chi(r);
  }
  const CutoffChi sq{10.0, 2};
  for (double r : {6.0, 7.5, 9.0}) EXPECT_NEAR(sq.weight(r), chi(r) * chi(r), 1e-15);
  EXPECT_NEAR(chi.weight(7.5), chi(7.5), 1e-15);
}

TEST(MorawetzWeight, InnerQuadraticRegion) {
  const MorawetzWeight w(4.0);
  for (double r : {0.01, 1.0, 3.0, 4.0}) {
    EXPECT_NEAR(w.a(r), r * r, 1e-12);
    EXPECT_NEAR(w.a_r(r), 2 * r, 1e-12);
    EXPECT_NEAR(w.a_rr(r), 2.0, 1e-12);
    EXPECT_NEAR(w.lap_a(r), 4.0, 1e-12);
    EXPECT_NEAR(w.bilap_a(r), 0.0, 1e-12);
  }
}

TEST(MorawetzWeight, OuterLinearRegion) {
  const double R = 4.0;
  const MorawetzWeight w(R);
  for (double r : {8.5, 12.0, 40.0}) {
    EXPECT_NEAR(w.a_r(r), 3 * R, 1e-12);
    EXPECT_NEAR(w.a_rr(r), 0.0, 1e-12);
    EXPECT_NEAR(w.lap_a(r), 3 * R / r, 1e-12);
    EXPECT_NEAR(w.bilap_a(r), 3 * R / (r * r * r), 1e-12);
  }
  // Growth 3R r beyond 2R; the additive constant is fixed by continuity.
  EXPECT_NEAR(w.a(3 * R) - w.a(2 * R), 3 * R * R, 1e-10);
  EXPECT_NEAR(w.a(R), R * R, 1e-12);
}

TEST(MorawetzWeight, SmoothJoins) {
  for (double R : {1.0, 10.0}) {
    const MorawetzWeight w(R);
    const double eps = 1e-9 * R;
    for (double x : {R, 2 * R}) {
      EXPECT_NEAR(w.a(x - eps), w.a(x + eps), 1e-6 * R * R);
      EXPECT_NEAR(w.a_r(x - eps), w.a_r(x + eps), 1e-6 * R);
      EXPECT_NEAR(w.a_rr(x - eps), w.a_rr(x + eps), 1e-6);
      EXPECT_NEAR(w.a_rrr(x - eps), w.a_rrr(x + eps), 1e-6 / R);
    }
  }
}

TEST(MorawetzWeight, MonotoneAndConvexOnBridge) {
  const MorawetzWeight w(10.0);
  for (double r = 10.0; r <= 20.0; r += 0.05) {
    EXPECT_GE(w.a_r(r), 0.0);
    EXPECT_GE(w.a_rr(r), -1e-14);
  }
}

TEST(MorawetzWeight, DerivativesMatchFiniteDifferences) {
  const MorawetzWeight w(3.0);
  const double h = 1e-5;
  for (double r : {3.4, 4.5, 5.9}) {
    EXPECT_NEAR((w.a(r + h) - w.a(r - h)) / (2 * h), w.a_r(r), 1e-6);
    EXPECT_NEAR((w.a_r(r + h) - w.a_r(r - h)) / (2 * h), w.a_rr(r), 1e-6);
    EXPECT_NEAR((w.a_rr(r + h) - w.a_rr(r - h)) / (2 * h), w.a_rrr(r), 1e-6);
    EXPECT_NEAR((w.a_rrr(r + h) - w.a_rrr(r - h)) / (2 * h), w.a_rrrr(r), 1e-6);
  }
}

TEST(MorawetzAction, RealFieldGivesZero) {
  const auto g = build_grid(20.0, 512);
  EXPECT_EQ(morawetz_action(gaussian(g, 1.0), MorawetzWeight(5.0)), 0.0);
}

TEST(MorawetzAction, ConjugationFlipsSign) {
  const auto g = build_grid(20.0, 512);
  const MorawetzWeight w(3.0);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Field u = random_smooth(g, seed);
    const double m = morawetz_action(u, w);
    EXPECT_NE(m, 0.0);
    EXPECT_NEAR(morawetz_action(conj(u), w), -m, 1e-14 * std::abs(m));
  }
}

TEST(MorawetzDerivative, ZeroField) {
  const auto g = build_grid(10.0, 128);
  const auto t = morawetz_derivative(Field(g), kP, MorawetzWeight(2.0));
  for (double v : t.term) EXPECT_EQ(v, 0.0);
}

TEST(MorawetzDerivative, QuadraticRegionClosedForm) {
  // Support well inside r ≤ R, where a = r².
  const auto g = build_grid(30.0, 4096);
  const Field u = gaussian(g, 0.8);
  const auto t = morawetz_derivative(u, kP, MorawetzWeight(25.0));
  const double pot = potential(u, kP), k = grad_sq(u), p = kP.p, b = kP.b;
  EXPECT_NEAR(t.term[0], 0.0, 1e-10);
  EXPECT_NEAR(t.term[1], 8.0 * k, 1e-10 * k);
  EXPECT_NEAR(t.term[2], -8.0 * p / (p + 2.0) * pot, 1e-10 * pot);
  EXPECT_NEAR(t.term[3], -8.0 * b / (p + 2.0) * pot, 1e-10 * pot);
  EXPECT_NEAR(t.sum(), 8.0 * (k - (p + b) / (p + 2.0) * pot), 1e-9 * k);
}

TEST(MorawetzDerivative, MatchesInstantaneousRateOfAction) {
  // One tiny symmetric step isolates the spatial discretization.
  const auto g = build_grid(20.0, 8192);
  const Field u = gaussian(g, 0.5);
  const double h = 1e-5;
  for (double R : {1.0, 2.0}) {
    const MorawetzWeight w(R);
    const double fd = (morawetz_action(step(u, kP, h), w) - morawetz_action(step(u, kP, -h), w)) / (2 * h);
    const double sum = morawetz_derivative(u, kP, w).sum();
    EXPECT_NEAR(fd, sum, 1e-4 * std::abs(sum)) << "R=" << R;
  }
}

TEST(MorawetzIdentity, ResidualShrinksAtSecondOrder) {
  const auto g = build_grid(20.0, 8192);
  const auto rows = morawetz_identity_study(gaussian(g, 0.3), kP, 1.0, 0.02, 2, {0.125, 0.25});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].ratio.has_value());
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_GT(*rows[k].ratio, 3.5) << "row " << k;
}

TEST(LocalMass, ZeroAndBump) {
  const auto g = build_grid(20.0, 4000);
  const CutoffChi chi{8.0, 1};
  EXPECT_EQ(local_mass(Field(g), chi), 0.0);
  const Field bump = sample(g, [](double r) { return r <= 4.0 ? 1.0 : 0.0; });
  EXPECT_NEAR(local_mass(bump, chi), M_PI * 16.0, 1e-9);
}

TEST(LocalMass, MonotoneInRadius) {
  const auto g = build_grid(20.0, 1024);
  const Field u = random_smooth(g, 3);
  double prev = 0.0;
  for (double R = 1.0; R <= 20.0; R += 0.5) {
    const double m = local_mass(u, CutoffChi{R, 1});
    EXPECT_GE(m, prev);
    prev = m;
  }
}

TEST(Threshold, GroundStateIsNotBelow) {
  const auto rep = threshold_check(q().profile, kP, q());
  EXPECT_NEAR(rep.margin_gradient, 0.0, 1e-12);
  EXPECT_NEAR(rep.margin_mass_energy, 0.0, 1e-12);
  EXPECT_FALSE(rep.below());
}

TEST(Threshold, HalfGroundStateIsBelow) {
  const auto rep = threshold_check(cplx(0.5) * q().profile, kP, q());
  EXPECT_TRUE(rep.below_gradient);
  EXPECT_NEAR(rep.gradient / rep.gradient_q, 0.5, 1e-12);
  EXPECT_TRUE(rep.below());
}

TEST(Threshold, NinetyPercentHasPositiveMargins) {
  const auto rep = threshold_check(cplx(0.9) * q().profile, kP, q());
  EXPECT_TRUE(rep.below());
  EXPECT_GT(rep.margin_gradient, 0.0);
  EXPECT_GT(rep.margin_mass_energy, 0.0);
  EXPECT_FALSE(rep.energy_negative);
}

TEST(Threshold, NegativeEnergyUsesGradientOnly) {
  const auto rep = threshold_check(cplx(1.3) * q().profile, kP, q());
  EXPECT_TRUE(rep.energy_negative);
  EXPECT_TRUE(std::isnan(rep.mass_energy));
  EXPECT_FALSE(rep.below());
}

TEST(Threshold, StrengthenedCondition) {
  const auto rep = threshold_check(cplx(0.5) * q().profile, kP, q(), 0.2);
  ASSERT_TRUE(rep.delta.has_value());
  EXPECT_TRUE(rep.below_strengthened);  // 0.5 < 1 - 0.4
  EXPECT_FALSE(threshold_check(cplx(0.7) * q().profile, kP, q(), 0.2).below_strengthened);
}

TEST(Threshold, GridMismatchRejected) {
  EXPECT_THROW(threshold_check(gaussian(build_grid(30.0, 1024), 0.5), kP, q()), RangeError);
}

TEST(RadialSobolev, HomogeneousOfDegreeZero) {
  const double base = radial_sobolev_ratio(q().profile);
  EXPECT_TRUE(std::isfinite(base));
  EXPECT_GT(base, 0.0);
  for (double lambda : {1e-3, 0.5, 7.0}) EXPECT_NEAR(radial_sobolev_ratio(cplx(lambda) * q().profile), base, 1e-12 * base);
  EXPECT_THROW(radial_sobolev_ratio(Field(q().profile.grid)), RangeError);
}

TEST(RadialSobolev, UniformlyBoundedOnSuite) {
  const auto suite = random_radial_suite(build_grid(30.0, 2048), 100, 7);
  double sup = 0.0;
  for (const auto& f : suite) sup = std::max(sup, radial_sobolev_ratio(f));
  EXPECT_LT(sup, 1.0);
}

TEST(Coercivity, ZeroFieldLeavesDeltaUndefined) {
  const auto rep = coercivity_check(Field(q().profile.grid), kP, CutoffChi{10.0, 1}, q());
  EXPECT_EQ(rep.lhs, 0.0);
  EXPECT_FALSE(rep.delta_prime.has_value());
}

TEST(Coercivity, SubThresholdIsCoercive) {
  const auto rep = coercivity_check(cplx(0.5) * q().profile, kP, CutoffChi{25.0, 1}, q(), 0.1);
  EXPECT_GT(rep.lhs, 0.0);
  ASSERT_TRUE(rep.delta_prime.has_value());
  EXPECT_GT(*rep.delta_prime, 0.0);
  EXPECT_TRUE(rep.ball_below);
}

TEST(Coercivity, DeltaPrimeStableAsRadiusDoubles) {
  const Field u = cplx(0.6) * q().profile;
  const double d1 = *coercivity_check(u, kP, CutoffChi{12.0, 1}, q()).delta_prime;
  const double d2 = *coercivity_check(u, kP, CutoffChi{24.0, 1}, q()).delta_prime;
  EXPECT_LT(std::max(d1, d2) / std::min(d1, d2), 2.0);
}

TEST(PotentialGrowth, ZeroDataLeavesBetaUnset) {
  const auto g = build_grid(10.0, 128);
  const auto traj = evolve(Field(g), kP, EvolveConfig{.dt = 0.01, .t_end = 0.2, .snapshot_stride = 1});
  const auto pg = spacetime_potential_growth(traj);
  EXPECT_FALSE(pg.beta_fit.has_value());
  for (const auto& [T, c] : pg.table) EXPECT_EQ(c, 0.0);
}

TEST(PotentialGrowth, SolitonGrowsLinearly) {
  const auto traj = evolve(q().profile, kP, EvolveConfig{.dt = 2e-3, .t_end = 1.0, .snapshot_stride = 10});
  const auto pg = spacetime_potential_growth(traj);
  ASSERT_TRUE(pg.beta_fit.has_value());
  EXPECT_NEAR(*pg.beta_fit, 1.0, 1e-2);
}

TEST(PotentialGrowth, SubThresholdGaussianIsSublinear) {
  const auto g = build_grid(60.0, 2048);
  const auto traj = evolve(gaussian(g, 0.5), kP, EvolveConfig{.dt = 4e-3, .t_end = 4.0, .snapshot_stride = 10});
  const auto pg = spacetime_potential_growth(traj);
  ASSERT_TRUE(pg.beta_fit.has_value());
  EXPECT_LT(*pg.beta_fit, 1.0);
  EXPECT_GT(*pg.beta_fit, 0.0);
}

TEST(PotentialGrowth, NeedsTenRecords) {
  const auto g = build_grid(10.0, 64);
  const auto traj = evolve(gaussian(g, 0.3), kP, EvolveConfig{.dt = 0.1, .t_end = 0.5, .snapshot_stride = 1});
  EXPECT_THROW(spacetime_potential_growth(traj), RangeError);
}

TEST(SlidingWindowMin, TrailingMinimum) {
  const std::vector<double> v{5, 3, 4, 6, 2, 7, 8, 9};
  const auto m = sliding_window_min(v, 3);
  const std::vector<double> expected{5, 3, 3, 3, 2, 2, 2, 7};
  EXPECT_EQ(m, expected);
  EXPECT_THROW(sliding_window_min(v, 0), RangeError);
}

TEST(SlidingWindowMin, BallPotentialDecaysForScatteringRun) {
  const auto g = build_grid(60.0, 2048);
  const auto traj = evolve(gaussian(g, 0.5), kP, EvolveConfig{.dt = 4e-3, .t_end = 4.0, .snapshot_stride = 10});
  std::vector<double> ball;
  for (const auto& u : traj.snapshots) ball.push_back(ball_potential(u, kP, 5.0));
  const auto m = sliding_window_min(ball, 5);
  EXPECT_LT(m.back(), 0.2 * m.front());
}

TEST(BallPotential, FullBallMatchesPotential) {
  const auto g = build_grid(20.0, 1024);
  const Field u = gaussian(g, 0.7);
  EXPECT_NEAR(ball_potential(u, kP, 20.0), potential(u, kP), 1e-14);
  EXPECT_LT(ball_potential(u, kP, 1.0), potential(u, kP));
}

TEST(Records, HookFillsEveryField) {
  const auto g = build_grid(20.0, 512);
  Field u = random_smooth(g, 2);
  const MorawetzWeight w(3.0);
  const CutoffChi chi{6.0, 1};
  const auto r = make_diagnostics_hook(kP, w, chi)(0.5, u);
  EXPECT_EQ(r.t, 0.5);
  EXPECT_EQ(r.mass, mass(u));
  EXPECT_EQ(r.grad_sq, grad_sq(u));
  EXPECT_EQ(r.morawetz_action, morawetz_action(u, w));
  EXPECT_EQ(r.local_mass, local_mass(u, chi));
  EXPECT_NEAR(r.h1_norm, h1_norm(u), 1e-14);
}

TEST(Records, CsvFormatIsFixed) {
  std::vector<DiagnosticsRecord> recs{{0.0, 1.0 / 3.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}};
  const auto path = std::filesystem::temp_directory_path() / "inls_records.csv";
  write_records_csv(recs, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "t,mass,energy,grad_sq,potential,morawetz_action,local_mass,h1_norm");
  EXPECT_EQ(row, "0,0.33333333333333331,2,3,4,5,6,7");
  std::filesystem::remove(path);
}
