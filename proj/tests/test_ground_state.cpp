#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fnls/ground_state.hpp"

using namespace fnls;

namespace {

const PhysicsParams kParams{1, 0.7, 0.8, 1.0};
const NonlinearitySpec kQuadratic{1, 0, 2};

Grid small_grid() { return Grid::cube(1, 512, 128.0); }

SolverOptions tight() {
  SolverOptions o;
  o.tol = 1e-8;
  return o;
}

ComplexField bump(const Grid& g, double centre, double width, Complex phase = 1.0) {
  return sample<Complex>(g, [&](std::span<const double> x) {
    return phase * std::exp(-0.5 * std::pow((x[0] - centre) / width, 2));
  });
}

double l2_distance(const ComplexField& a, const ComplexField& b) { return std::sqrt(mass(a - b)); }

double centroid(const ComplexField& u) {
  double m = 0.0, x = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    m += std::norm(u[i]);
    x += std::norm(u[i]) * u.grid().coordinate(0, i);
  }
  return x / m;
}

// The quadratic minimizer is shared by several tests; solve it once.
const GroundStateResult& quadratic_ground_state() {
  static const GroundStateResult gs = [] {
    const RieszKernelPlan plan(small_grid(), kParams.beta);
    return solve_ground_state(kParams, kQuadratic, plan, {}, tight());
  }();
  return gs;
}

}  // namespace

TEST(GroundState, LinearProblemRelaxesToConstantMode) {
  const Grid g = Grid::cube(1, 32, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  SolverOptions o = tight();
  o.check_admissibility = false;
  const auto gs = solve_ground_state({1, 0.5, 0.5, 2.0}, {0, 0, 2}, plan, {}, o);
  EXPECT_TRUE(gs.converged);
  EXPECT_NEAR(gs.kappa, 0.0, 1e-10);
  EXPECT_NEAR(gs.energy.total, 0.0, 1e-10);
  const double level = std::sqrt(2.0 / 10.0);
  for (const auto& v : gs.state.values()) EXPECT_NEAR(std::abs(v - level), 0.0, 1e-6);
}

TEST(GroundState, AdmissibleConfigurationHasNegativeEnergy) {
  const auto& gs = quadratic_ground_state();
  EXPECT_TRUE(gs.converged);
  EXPECT_LT(gs.energy.total, 0.0);
  EXPECT_LT(gs.energy.total, -10.0 * gs.energy_uncertainty);
  EXPECT_LE(gs.el_residual, 10.0 * 1e-8);
  EXPECT_NEAR(mass(gs.state), 1.0, 1e-12);
  EXPECT_TRUE(gs.warnings.empty());
}

TEST(GroundState, StateIsGaugeFixedRealAndNonnegative) {
  const auto& gs = quadratic_ground_state();
  double peak = 0.0;
  for (const auto& v : gs.state.values()) {
    EXPECT_NEAR(v.imag(), 0.0, 1e-10);
    EXPECT_GE(v.real(), -1e-10);
    peak = std::max(peak, v.real());
  }
  EXPECT_EQ(gs.state[256].real(), peak);
}

TEST(GroundState, EnergyHistoryIsMonotoneAfterWarmup) {
  const auto& gs = quadratic_ground_state();
  ASSERT_GT(gs.history.size(), 20u);
  for (std::size_t i = 1; i < gs.history.size(); ++i) {
    if (gs.history[i].iter <= 10) continue;
    EXPECT_LE(gs.history[i].energy.total, gs.history[i - 1].energy.total + 1e-12) << "iter " << gs.history[i].iter;
  }
}

TEST(GroundState, MultiplierAgreesWithEulerLagrange) {
  const auto& gs = quadratic_ground_state();
  const RieszKernelPlan plan(small_grid(), kParams.beta);
  EXPECT_NEAR(gs.kappa, lagrange_multiplier(gs.state, kParams, kQuadratic, plan), 1e-8);
  EXPECT_LT(gs.kappa, 0.0);
  const auto r = el_residual(gs.state, gs.kappa, kParams, kQuadratic, plan);
  EXPECT_NEAR(std::sqrt(mass(r)) / hs_norm(gs.state, kParams.s), gs.el_residual, 1e-9);
}

TEST(GroundState, DifferentStartsReachTheSameProfile) {
  const Grid g = small_grid();
  const RieszKernelPlan plan(g, kParams.beta);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), width(1.0, 3.0);
  auto random_start = [&] {
    auto u = bump(g, pos(rng), width(rng));
    u += bump(g, pos(rng), width(rng), 0.5);
    return u;
  };
  const auto a = solve_ground_state(kParams, kQuadratic, plan, random_start(), tight());
  const auto b = solve_ground_state(kParams, kQuadratic, plan, random_start(), tight());
  ASSERT_TRUE(a.converged && b.converged);
  EXPECT_NEAR(a.energy.total, b.energy.total, 1e-8);
  // Gauge fixing rounds the centroid to the grid; align the residual sub-grid offset spectrally.
  const auto aligned = translate_spectral(b.state, {centroid(b.state) - centroid(a.state), 0.0, 0.0});
  EXPECT_LT(l2_distance(a.state, aligned), 1e-6);
}

TEST(GroundState, MassIsRestoredEveryIteration) {
  const RieszKernelPlan plan(small_grid(), kParams.beta);
  SolverOptions o;
  o.max_iters = 50;
  const auto gs = solve_ground_state({1, 0.7, 0.8, 3.0}, kQuadratic, plan, bump(small_grid(), 1.0, 2.0), o);
  EXPECT_FALSE(gs.converged);
  EXPECT_EQ(gs.iterations, 50u);
  EXPECT_NEAR(mass(gs.state), 3.0, 3e-13);
  for (const auto& h : gs.history) EXPECT_NEAR(h.energy.mass, 3.0, 3e-13);
  ASSERT_FALSE(gs.warnings.empty());
  EXPECT_EQ(gs.warnings.back(), "not converged within max_iters");
}

TEST(GroundState, RejectsInvalidInputs) {
  const Grid g = small_grid();
  const RieszKernelPlan plan(g, kParams.beta);
  // N = 3 Coulomb-critical: existence holds but negative energy is not guaranteed.
  EXPECT_THROW(solve_ground_state({3, 0.5, 2.0, 1.0}, kQuadratic, RieszKernelPlan(Grid::cube(3, 8, 8.0), 2.0)),
               DomainError);
  EXPECT_THROW(solve_ground_state(kParams, kQuadratic, plan, ComplexField(g)), DomainError);
  EXPECT_THROW(solve_ground_state(kParams, kQuadratic, plan, bump(Grid::cube(1, 256, 128.0), 0.0, 1.0)), GridMismatch);
  EXPECT_THROW(solve_ground_state({1, 0.7, 0.8, -1.0}, kQuadratic, plan), DomainError);
}

TEST(GroundState, EnergyFloorAbortsWithDiagnostic) {
  const RieszKernelPlan plan(small_grid(), kParams.beta);
  SolverOptions o;
  o.energy_floor = -0.1;
  try {
    solve_ground_state(kParams, kQuadratic, plan, {}, o);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("supercritical"), std::string::npos);
  }
}

TEST(GaugeFix, CentredRealBumpIsUnchanged) {
  const Grid g = Grid::cube(1, 64, 10.0);
  const auto u = bump(g, 0.0, 1.0);
  const auto v = gauge_fix(u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(std::abs(v[i] - u[i]), 0.0, 1e-15);
}

TEST(GaugeFix, RemovesGlobalPhase) {
  const Grid g = Grid::cube(1, 64, 10.0);
  const auto u = bump(g, 0.0, 1.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> sigma(-3.2, 3.2);
  for (int trial = 0; trial < 20; ++trial) {
    auto w = u;
    w *= std::polar(1.0, sigma(rng));
    const auto v = gauge_fix(w);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(std::abs(v[i] - u[i]), 0.0, 1e-12);
  }
}

TEST(GaugeFix, UndoesGridShiftExactly) {
  const Grid g = Grid::cube(2, 32, 10.0);
  const auto u = sample<Complex>(g, [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
  const auto v = gauge_fix(translate(u, {5, -3, 0}));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(std::abs(v[i] - u[i]), 0.0, 1e-15);
  EXPECT_THROW(gauge_fix(ComplexField(g)), DomainError);
}

TEST(MassEnergyCurve, SingleLambdaMatchesSolver) {
  const RieszKernelPlan plan(small_grid(), kParams.beta);
  const auto curve = mass_energy_curve(kParams, kQuadratic, plan, {1.0}, tight());
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_FALSE(curve.error);
  EXPECT_EQ(curve.points[0].energy, quadratic_ground_state().energy.total);
  EXPECT_EQ(curve.points[0].kappa, quadratic_ground_state().kappa);
}

TEST(MassEnergyCurve, EnergiesNegativeAndStrictlySubadditive) {
  const RieszKernelPlan plan(small_grid(), kParams.beta);
  const auto curve = mass_energy_curve(kParams, kQuadratic, plan, {0.5, 1.0}, tight());
  ASSERT_EQ(curve.points.size(), 2u);
  for (const auto& p : curve.points) {
    EXPECT_TRUE(p.converged);
    EXPECT_LT(p.energy, 0.0);
  }
  const auto* half = curve.find(0.5);
  const auto* one = curve.find(1.0);
  ASSERT_TRUE(half && one);
  const double margin = 2.0 * half->energy - one->energy;
  EXPECT_GT(margin, 10.0 * (one->energy_uncertainty + 2.0 * half->energy_uncertainty));
  EXPECT_EQ(curve.find(0.75), nullptr);
}

TEST(MassEnergyCurve, FailureKeepsEarlierPoints) {
  const RieszKernelPlan plan(small_grid(), kParams.beta);
  const auto curve = mass_energy_curve(kParams, kQuadratic, plan, {0.5, -1.0, 1.0}, tight());
  EXPECT_EQ(curve.points.size(), 1u);
  ASSERT_TRUE(curve.error);
  EXPECT_NE(curve.error->find("lambda=-1"), std::string::npos);
}
