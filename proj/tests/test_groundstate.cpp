#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"

using namespace inls;
using inls::test::cached_ground_state;

namespace {

const GroundState& q25() { return cached_ground_state(2.0, 0.5, 30.0, 4096); }

struct Pair {
  double p, b;
};

}  // namespace

TEST(GroundState, ConvergesWithUnitMultiplier) {
  const auto& gs = q25();
  EXPECT_LE(gs.residual, 1e-10);
  EXPECT_NEAR(gs.multiplier, 1.0, 1e-9);
  EXPECT_GT(gs.iterations, 0);
  EXPECT_EQ(elliptic_residual(gs.profile, make_params(2.0, 0.5)), gs.residual);
}

TEST(GroundState, RealNonnegativeDecreasing) {
  const auto& q = q25().profile;
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_EQ(q[i].imag(), 0.0);
    EXPECT_GE(q[i].real(), 0.0);
    if (i > 0) {
      EXPECT_LE(q[i].real(), q[i - 1].real() + 1e-14) << "i=" << i;
    }
  }
}

TEST(GroundState, KineticRelation) {
  const auto& gs = q25();
  EXPECT_NEAR(gs.grad_Q / gs.mass_Q, 5.0 / 3.0, 1e-4 * 5.0 / 3.0);
}

// Multiplying the equation by Q and by x·∇Q gives K + M = P and
// K = (p + b)/(p + 2) P, hence P/M = (p + 2)/(2 - b); this differs from the
// kinetic constant (p + b)/(2 - b).
TEST(GroundState, PotentialRelationIsPohozaevValue) {
  for (const Pair pb : {Pair{2.0, 0.5}, Pair{3.0, 0.3}, Pair{2.5, 0.8}}) {
    const auto& gs = cached_ground_state(pb.p, pb.b, 30.0, 4096);
    const double expected = (pb.p + 2.0) / (2.0 - pb.b);
    EXPECT_NEAR(gs.pot_Q / gs.mass_Q, expected, 1e-3 * expected) << "p=" << pb.p << " b=" << pb.b;
    EXPECT_NEAR(gs.grad_Q + gs.mass_Q, gs.pot_Q, 1e-3 * gs.pot_Q);
  }
}

TEST(GroundState, RelationsConvergeAtSecondOrder) {
  // The discrete profile satisfies the continuum identities up to O(dr²).
  for (const Pair pb : {Pair{2.0, 0.5}, Pair{3.0, 0.3}, Pair{2.5, 0.8}}) {
    const double c = make_params(pb.p, pb.b).c_pdb;
    const auto& coarse = cached_ground_state(pb.p, pb.b, 30.0, 2048);
    const auto& fine = cached_ground_state(pb.p, pb.b, 30.0, 4096);
    const double e1 = std::abs(coarse.grad_Q / coarse.mass_Q - c), e2 = std::abs(fine.grad_Q / fine.mass_Q - c);
    EXPECT_GT(e1 / e2, 3.5) << "p=" << pb.p << " b=" << pb.b;
    EXPECT_LT(e2 / c, 1e-3);
  }
}

TEST(GroundState, MassStableUnderRefinement) {
  const auto& a = cached_ground_state(2.0, 0.5, 30.0, 2048);
  const auto& b = q25();
  EXPECT_LT(std::abs(a.mass_Q - b.mass_Q) / b.mass_Q, 1e-3);
}

TEST(GroundState, ResidualMonotoneOverFinalIterations) {
  for (const Pair pb : {Pair{2.0, 0.5}, Pair{3.0, 0.3}, Pair{2.5, 0.8}}) {
    const auto& h = cached_ground_state(pb.p, pb.b, 30.0, 4096).residual_history;
    ASSERT_GE(h.size(), 10u);
    for (std::size_t k = h.size() - 9; k < h.size(); ++k) EXPECT_LT(h[k], h[k - 1]) << "k=" << k;
  }
}

TEST(GroundState, IterationCapRaises) {
  try {
    solve_ground_state(make_params(2.0, 0.5), build_grid(30.0, 1024), 1e-10, 2);
    FAIL() << "expected GroundStateError";
  } catch (const GroundStateError& e) {
    EXPECT_EQ(e.iterations, 2);
    EXPECT_GT(e.last_residual, 1e-10);
  }
  EXPECT_THROW(solve_ground_state(make_params(2.0, 0.5), build_grid(30.0, 1024), 0.0), RangeError);
}

TEST(SharpConstant, ExponentAndFormula) {
  const auto pp = make_params(2.0, 0.5);
  EXPECT_DOUBLE_EQ((4.0 - 2.0 * pp.p - 2.0 * pp.b) / 4.0, -0.25);
  const auto& gs = q25();
  const double expected = std::pow(pp.c_pdb, -0.25) * 4.0 / (2.5 * gs.mass_Q);  // ‖Q‖^2 = M
  EXPECT_NEAR(sharp_gn_constant(pp, gs), expected, 1e-14 * expected);
}

TEST(SharpConstant, DoublingNormScalesByTwoToMinusP) {
  for (const Pair pb : {Pair{2.0, 0.5}, Pair{3.0, 0.3}}) {
    const auto pp = make_params(pb.p, pb.b);
    GroundState gs = cached_ground_state(pb.p, pb.b, 30.0, 4096);
    const double c0 = sharp_gn_constant(pp, gs);
    gs.profile = cplx(2.0) * gs.profile;
    gs.mass_Q *= 4.0;
    EXPECT_NEAR(sharp_gn_constant(pp, gs) / c0, std::pow(2.0, -pb.p), 1e-14);
  }
}

TEST(GnRatio, EqualityAtGroundState) {
  const auto& gs = cached_ground_state(2.0, 0.5, 30.0, 8192);
  EXPECT_NEAR(gn_ratio(gs.profile, make_params(2.0, 0.5), gs.c0), 1.0, 1e-4);
}

TEST(GnRatio, StrictForGaussian) {
  const auto& gs = q25();
  const double r = gn_ratio(test::gaussian(gs.profile.grid, 1.0), make_params(2.0, 0.5), gs.c0);
  EXPECT_GT(r, 0.0);
  EXPECT_LT(r, 1.0);
}

TEST(GnRatio, ScaleInvariant) {
  const auto& gs = q25();
  const auto pp = make_params(2.0, 0.5);
  const double base = gn_ratio(gs.profile, pp, gs.c0);
  for (double lambda : {0.1, 0.5, 3.0, 40.0})
    EXPECT_NEAR(gn_ratio(cplx(lambda) * gs.profile, pp, gs.c0), base, 1e-12);
}

TEST(GnRatio, BoundedOnRandomSuite) {
  const auto& gs = q25();
  const auto pp = make_params(2.0, 0.5);
  for (const auto& f : random_radial_suite(gs.profile.grid, 50, 99)) EXPECT_LE(gn_ratio(f, pp, gs.c0), 1.0 + 1e-3);
}

TEST(GnRatio, ZeroFieldRejected) {
  const auto& gs = q25();
  EXPECT_THROW(gn_ratio(Field(gs.profile.grid), make_params(2.0, 0.5), gs.c0), RangeError);
}

TEST(GroundStateCsv, RoundTrip) {
  const auto pp = make_params(2.0, 0.5);
  const auto gs = solve_ground_state(pp, build_grid(20.0, 512));
  const auto path = std::filesystem::temp_directory_path() / "inls_gs_roundtrip.csv";
  save_ground_state_csv(gs, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "r,Q");
  const auto back = load_ground_state_csv(path, pp);
  ASSERT_EQ(back.profile.size(), gs.profile.size());
  for (std::size_t i = 0; i < gs.profile.size(); ++i) EXPECT_EQ(back.profile[i], gs.profile[i]);
  EXPECT_EQ(back.mass_Q, gs.mass_Q);
  EXPECT_EQ(back.c0, gs.c0);
  std::filesystem::remove(path);
}

TEST(GroundStateCsv, RejectsWrongHeader) {
  const auto path = std::filesystem::temp_directory_path() / "inls_gs_bad.csv";
  std::ofstream(path) << "x,y\n0.5,1\n";
  EXPECT_THROW(load_ground_state_csv(path, make_params(2.0, 0.5)), std::runtime_error);
  std::filesystem::remove(path);
}
