#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fnls/evolution.hpp"
#include "fnls/ground_state.hpp"

using namespace fnls;

namespace {

constexpr double kPi = std::numbers::pi;
const PhysicsParams kParams{1, 0.7, 0.8, 1.0};
const NonlinearitySpec kQuadratic{1, 0, 2};
const NonlinearitySpec kFree{0, 0, 2};

Grid grid() { return Grid::cube(1, 512, 128.0); }

// A moving Gaussian: exercises both sub-flows.
ComplexField moving_gaussian(const Grid& g) {
  return sample<Complex>(g, [](std::span<const double> x) {
    return std::exp(-x[0] * x[0] / 4.0) * std::polar(1.0, 0.5 * x[0]);
  });
}

double l2_distance(const ComplexField& a, const ComplexField& b) { return std::sqrt(mass(a - b)); }

const GroundStateResult& ground_state() {
  static const GroundStateResult gs = [] {
    SolverOptions o;
    o.tol = 1e-9;
    return solve_ground_state(kParams, kQuadratic, RieszKernelPlan(grid(), kParams.beta), {}, o);
  }();
  return gs;
}

}  // namespace

TEST(Strang, FreePlaneWaveAdvancesPhaseExactly) {
  const Grid g = Grid::cube(1, 64, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  const PhysicsParams p{1, 0.6, 0.5, 1.0};
  const double k0 = 2.0 * kPi * 3.0 / 10.0;
  const auto phi0 = sample<Complex>(g, [&](std::span<const double> x) { return std::polar(1.0, k0 * x[0]); });
  const double T = 2.5;
  const auto traj = evolve(phi0, T, 0.01, p, kFree, plan);
  ASSERT_FALSE(traj.error);
  const Complex rotation = std::polar(1.0, T * std::pow(k0, 2.0 * p.s));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(traj.final_state[i] - rotation * phi0[i]), 0.0, 1e-12);
}

TEST(Strang, StepThenReverseStepRestoresState) {
  const Grid g = grid();
  const RieszKernelPlan plan(g, kParams.beta);
  const auto phi0 = moving_gaussian(g);
  for (double dt : {1e-3, 0.05}) {
    const auto back = step_strang(step_strang(phi0, dt, kParams, kQuadratic, plan), -dt, kParams, kQuadratic, plan);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(back[i] - phi0[i]), 0.0, 1e-11) << "dt=" << dt;
  }
  EXPECT_THROW(step_strang(phi0, 0.0, kParams, kQuadratic, plan), DomainError);
}

TEST(Strang, StandingWaveLocalErrorIsThirdOrder) {
  const auto& gs = ground_state();
  ASSERT_TRUE(gs.converged);
  const RieszKernelPlan plan(grid(), kParams.beta);
  auto local_error = [&](double dt) {
    auto exact = gs.state;
    exact *= std::polar(1.0, gs.kappa * dt);
    return l2_distance(step_strang(gs.state, dt, kParams, kQuadratic, plan), exact);
  };
  const double e1 = local_error(0.2), e2 = local_error(0.1);
  EXPECT_NEAR(e1 / e2, 8.0, 1.0);
  EXPECT_LT(e1, 1e-2);
}

TEST(Strang, GaugeCovariance) {
  const Grid g = grid();
  const RieszKernelPlan plan(g, kParams.beta);
  const auto phi0 = moving_gaussian(g);
  const Complex rot = std::polar(1.0, 1.234);
  auto rotated = phi0;
  rotated *= rot;
  const auto a = evolve(phi0, 1.0, 0.01, kParams, kQuadratic, plan).final_state;
  const auto b = evolve(rotated, 1.0, 0.01, kParams, kQuadratic, plan).final_state;
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(b[i] - rot * a[i]), 0.0, 1e-11);
}

TEST(Evolve, MassConservedEveryStep) {
  const Grid g = grid();
  const RieszKernelPlan plan(g, kParams.beta);
  const auto traj = evolve(moving_gaussian(g), 2.0, 0.01, kParams, kQuadratic, plan);
  ASSERT_EQ(traj.records.size(), 201u);
  const double m0 = traj.records.front().mass;
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    EXPECT_NEAR(traj.records[i].mass, traj.records[i - 1].mass, 1e-13 * m0);
    EXPECT_GT(traj.records[i].t, traj.records[i - 1].t);
  }
}

TEST(Evolve, EnergyDriftIsSecondOrder) {
  const Grid g = grid();
  const RieszKernelPlan plan(g, kParams.beta);
  auto drift = [&](double dt) {
    const auto traj = evolve(moving_gaussian(g), 2.0, dt, kParams, kQuadratic, plan);
    double worst = 0.0;
    for (const auto& r : traj.records) worst = std::max(worst, std::abs(r.energy_J - traj.records.front().energy_J));
    return worst;
  };
  EXPECT_NEAR(drift(0.02) / drift(0.01), 4.0, 0.5);
}

TEST(Evolve, MergedHalfStepsMatchRepeatedStrangSteps) {
  const Grid g = grid();
  const RieszKernelPlan plan(g, kParams.beta);
  auto phi = moving_gaussian(g);
  EvolveOptions o;
  o.record_stride = 7;
  const auto traj = evolve(phi, 0.5, 0.01, kParams, kQuadratic, plan, o);
  for (int n = 0; n < 50; ++n) phi = step_strang(phi, 0.01, kParams, kQuadratic, plan);
  EXPECT_LT(l2_distance(traj.final_state, phi), 1e-12);
  // Records at steps 0, 7, ..., 49 and the final step 50.
  ASSERT_EQ(traj.records.size(), 9u);
  EXPECT_NEAR(traj.records[1].t, 0.07, 1e-15);
  EXPECT_DOUBLE_EQ(traj.records.back().t, 0.5);
}

TEST(Evolve, StepCountRoundsToFinalTime) {
  const Grid g = Grid::cube(1, 32, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  const auto traj = evolve(moving_gaussian(g), 1.0, 0.3, kParams, kFree, plan);
  EXPECT_EQ(traj.steps, 3u);
  EXPECT_DOUBLE_EQ(traj.dt, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(traj.records.back().t, 1.0);
}

TEST(Evolve, CallbacksSeeRecordsAndDumps) {
  const Grid g = Grid::cube(1, 32, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  EvolveOptions o;
  o.record_stride = 4;
  std::size_t seen = 0;
  std::vector<std::size_t> dumps;
  o.on_record = [&](const TrajectoryRecord&) { ++seen; };
  o.dump_every = 5;
  o.on_dump = [&](std::size_t n, double, const ComplexField&) { dumps.push_back(n); };
  const auto traj = evolve(moving_gaussian(g), 0.12, 0.01, kParams, kQuadratic, plan, o);
  EXPECT_EQ(seen, traj.records.size());
  EXPECT_EQ(dumps, (std::vector<std::size_t>{5, 10}));
}

TEST(Evolve, StandingWaveStaysOnItsOrbit) {
  const auto& gs = ground_state();
  const RieszKernelPlan plan(grid(), kParams.beta);
  EvolveOptions o;
  o.record_stride = 50;
  o.reference = gs.state;
  const auto traj = evolve(gs.state, 2.0, 0.01, kParams, kQuadratic, plan, o);
  ASSERT_FALSE(traj.error);
  const double norm = hs_norm(gs.state, kParams.s);
  for (const auto& r : traj.records) {
    ASSERT_TRUE(r.orbit_distance && r.overlap_phase);
    EXPECT_LT(*r.orbit_distance, 1e-4 * norm);
    // <phi(t), u> = e^{i kappa t} lambda.
    EXPECT_NEAR(std::abs(std::remainder(*r.overlap_phase - gs.kappa * r.t, 2.0 * kPi)), 0.0, 1e-4);
  }
}

TEST(Evolve, NonFiniteStateAbortsWithPartialTrajectory) {
  const Grid g = Grid::cube(1, 32, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  auto phi0 = moving_gaussian(g);
  phi0[3] = std::numeric_limits<double>::quiet_NaN();
  const auto traj = evolve(phi0, 1.0, 0.1, kParams, kFree, plan);
  ASSERT_TRUE(traj.error);
  EXPECT_NE(traj.error->find("non-finite"), std::string::npos);
  EXPECT_EQ(traj.records.size(), 1u);
  EXPECT_THROW(step_strang(phi0, 0.1, kParams, kFree, plan), SolverError);
}

TEST(Evolve, RejectsInvalidArguments) {
  const Grid g = Grid::cube(1, 32, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  const auto phi0 = moving_gaussian(g);
  EXPECT_THROW(evolve(phi0, 0.0, 0.1, kParams, kFree, plan), DomainError);
  EXPECT_THROW(evolve(phi0, 1.0, -0.1, kParams, kFree, plan), DomainError);
  EXPECT_THROW(evolve(moving_gaussian(Grid::cube(1, 64, 10.0)), 1.0, 0.1, kParams, kFree, plan), GridMismatch);
  EvolveOptions o;
  o.record_stride = 0;
  EXPECT_THROW(evolve(phi0, 1.0, 0.1, kParams, kFree, plan, o), DomainError);
}

TEST(Evolve, DefaultTimeStepScalesWithResolution) {
  const Grid g = Grid::cube(1, 128, 32.0);
  EXPECT_DOUBLE_EQ(default_time_step(g, 0.5), 0.01 * 0.25);
  EXPECT_DOUBLE_EQ(default_time_step(g, 1.0, 2.0), 0.02 * 0.0625);
}
