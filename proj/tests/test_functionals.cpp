#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fnls/functionals.hpp"

using namespace fnls;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename T = double>
Field<T> gaussian(const Grid& g, double sigma, double amp = 1.0) {
  return sample<T>(g, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return T(amp * std::exp(-r2 / (2.0 * sigma * sigma)));
  });
}

RealField smooth_random(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  const double a = n(rng), b = n(rng), c = n(rng);
  return sample<double>(g, [&](std::span<const double> x) {
    return std::exp(-0.3 * x[0] * x[0]) * (1.0 + 0.3 * a * std::sin(x[0]) + 0.2 * b * std::cos(2.0 * x[0]) + 0.1 * c * x[0]);
  });
}

}  // namespace

TEST(Energy, GaussianKineticMatchesClosedForm) {
  // ||(-Delta)^{s/2} e^{-x^2/(2 sigma^2)}||^2 = sigma^{1-2s} Gamma(s + 1/2) on the line. The
  // periodic box samples the cusp of |k|^{2s} at k = 0, an error of order dk^{2s+1}: doubling
  // the box must divide it by 2^{2s+1}. At s = 1 the symbol is smooth and the error vanishes.
  const double sigma = 1.3;
  auto error = [&](double s, double length) {
    const Grid g = Grid::cube(1, static_cast<std::size_t>(6.4 * length), length);
    return kinetic(gaussian(g, sigma), s) - std::pow(sigma, 1.0 - 2.0 * s) * std::tgamma(s + 0.5);
  };
  EXPECT_NEAR(error(1.0, 160.0), 0.0, 1e-12);
  for (double s : {0.3, 0.5, 0.7}) {
    const double e1 = error(s, 160.0), e2 = error(s, 320.0);
    EXPECT_LT(std::abs(e1), 5e-3);
    EXPECT_NEAR(e1 / e2, std::pow(2.0, 2.0 * s + 1.0), 0.02 * std::pow(2.0, 2.0 * s + 1.0)) << "s=" << s;
  }
}

TEST(Energy, CoulombSelfInteractionOfGaussian) {
  // G(u) = u^2 with u = e^{-r^2/4} gives a unit-width Gaussian density of mass (2 pi)^{3/2};
  // its Coulomb self energy is M^2 / sqrt(pi).
  const Grid g = Grid::cube(3, 32, 16.0);
  const RieszKernelPlan plan(g, 2.0);
  const auto e = energy(gaussian(g, std::sqrt(2.0)), PhysicsParams{3, 0.5, 2.0, 1.0}, NonlinearitySpec{1, 0, 2}, plan);
  const double m = std::pow(2.0 * kPi, 1.5);
  EXPECT_NEAR(e.interaction, 0.5 * m * m / std::sqrt(kPi), 1e-7 * m * m);
  EXPECT_NEAR(e.total, e.kinetic - e.interaction, 1e-14 * e.interaction);
  EXPECT_NEAR(e.mass, std::pow(2.0 * kPi, 1.5), 1e-12 * e.mass);
}

TEST(Energy, AmplitudeScalingOfQuadraticModel) {
  const Grid g = Grid::cube(1, 128, 20.0);
  const PhysicsParams p{1, 0.7, 0.8, 1.0};
  const NonlinearitySpec spec{1, 0, 2};
  const RieszKernelPlan plan(g, p.beta);
  const auto u = gaussian(g, 1.0);
  const auto e1 = energy(u, p, spec, plan);
  const auto e2 = energy(2.0 * u, p, spec, plan);
  EXPECT_NEAR(e2.kinetic, 4.0 * e1.kinetic, 1e-12 * e2.kinetic);
  EXPECT_NEAR(e2.interaction, 16.0 * e1.interaction, 1e-12 * e2.interaction);
}

TEST(Energy, ComplexEnergyIsPhaseInvariant) {
  const Grid g = Grid::cube(2, 32, 10.0);
  const PhysicsParams p{2, 0.6, 1.1, 1.0};
  const NonlinearitySpec spec{0.5, 1.0, 2.4};
  const RieszKernelPlan plan(g, p.beta);
  const auto u = gaussian<Complex>(g, 1.2);
  auto v = u;
  v *= std::polar(1.0, 0.9);
  const auto a = energy(u, p, spec, plan);
  const auto b = energy(v, p, spec, plan);
  EXPECT_NEAR(a.total, b.total, 1e-13 * std::abs(a.total));
  EXPECT_NEAR(lagrange_multiplier(u, p, spec, plan), lagrange_multiplier(v, p, spec, plan), 1e-12);
}

TEST(Energy, LinearModelHasNoInteraction) {
  const Grid g = Grid::cube(1, 64, 10.0);
  const RieszKernelPlan plan(g, 0.5);
  const auto u = gaussian(g, 1.0);
  const auto e = energy(u, PhysicsParams{1, 0.5, 0.5, 1.0}, NonlinearitySpec{0, 0, 2}, plan);
  EXPECT_EQ(e.interaction, 0.0);
  const auto w = hartree_potential(u, NonlinearitySpec{0, 0, 2}, plan);
  for (double v : w.values()) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, MatchesDirectionalDerivative) {
  const Grid g = Grid::cube(1, 128, 24.0);
  for (const auto& spec : {NonlinearitySpec{1, 0, 2}, NonlinearitySpec{0.5, 0.8, 2.6}}) {
    const PhysicsParams p{1, 0.7, 0.8, 1.0};
    const RieszKernelPlan plan(g, p.beta);
    const auto u = smooth_random(g, 11);
    const auto v = smooth_random(g, 12);
    const auto grad = energy_gradient(u, p, spec, plan);
    const double predicted = l2_inner(grad, v);
    const double eps = 1e-4;
    const double fd =
        (energy(u + eps * v, p, spec, plan).total - energy(u - eps * v, p, spec, plan).total) / (2.0 * eps);
    EXPECT_NEAR(fd, predicted, 1e-7 * std::abs(predicted) + 1e-10);
  }
}

TEST(Multiplier, ResidualIsOrthogonalToState) {
  const Grid g = Grid::cube(1, 128, 24.0);
  const PhysicsParams p{1, 0.7, 0.8, 1.0};
  const NonlinearitySpec spec{1, 1, 2.5};
  const RieszKernelPlan plan(g, p.beta);
  const auto u = to_complex(smooth_random(g, 3));
  const double kappa = lagrange_multiplier(u, p, spec, plan);
  const auto r = el_residual(u, kappa, p, spec, plan);
  EXPECT_NEAR(l2_inner(r, u).real(), 0.0, 1e-12 * std::sqrt(mass(r) * mass(u)));
  EXPECT_THROW(lagrange_multiplier(ComplexField(g), p, spec, plan), DomainError);
}

TEST(Multiplier, MismatchedGridIsRejected) {
  const RieszKernelPlan plan(Grid::cube(1, 64, 10.0), 0.5);
  const auto u = gaussian(Grid::cube(1, 32, 10.0), 1.0);
  EXPECT_THROW(energy(u, PhysicsParams{1, 0.5, 0.5, 1.0}, NonlinearitySpec{}, plan), GridMismatch);
}
