#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/functionals.hpp"
#include "fnls/grid.hpp"
#include "fnls/model.hpp"
#include "fnls/riesz.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

struct HistoryEntry {
  std::size_t iter = 0;
  EnergyBreakdown energy;
  double residual = 0.0;
  double kappa = 0.0;
};

struct GroundStateResult {
  ComplexField state;
  double kappa = 0.0;
  EnergyBreakdown energy;
  /// ||(-Delta)^s u - kappa u - N(u)||_2 / ||u||_{H^s}.
  double el_residual = 0.0;
  /// First-order bound on the energy error: ||residual||_2 ||u||_2.
  double energy_uncertainty = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_step = 0.0;
  double boundary_mass_fraction = 0.0;
  std::vector<HistoryEntry> history;
  std::vector<std::string> warnings;
};

struct SolverOptions {
  /// Gradient-flow step; 0 selects 0.1 h_min^{2s}.
  double step = 0.0;
  double tol = 1e-8;
  std::size_t max_iters = 200000;
  std::size_t max_halvings = 5;
  std::size_t warmup = 10;
  double energy_floor = -1e8;
  double amplitude_ceiling = 1e8;
  /// Warn when more than this fraction of the mass sits in the outer 10% of the box.
  double boundary_tolerance = 1e-6;
  /// Refuse configurations whose infimum is not guaranteed negative.
  bool check_admissibility = true;
  /// Keep every `history_stride`-th iteration in the history (the last one is always kept).
  std::size_t history_stride = 1;
};

inline double default_step(const Grid& grid, double s) { return 0.1 * std::pow(grid.min_spacing(), 2.0 * s); }

/// Centred Gaussian with width L_j/8 per axis scaled to the given mass.
inline ComplexField default_initial_state(const Grid& grid, double mass_target) {
  auto u = sample<Complex>(grid, [&](std::span<const double> x) {
    double e = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) e += std::pow(x[j] / (grid.length(j) / 8.0), 2);
    return Complex(std::exp(-0.5 * e));
  });
  u *= std::sqrt(mass_target / mass(u));
  return u;
}

/// Removes the global phase (making <|u|, u> real positive) and circularly shifts the periodic
/// density centroid to the box centre, rounded to the nearest grid point.
inline ComplexField gauge_fix(const ComplexField& u) {
  const Grid& g = u.grid();
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) overlap += std::abs(u[i]) * u[i];
  if (std::abs(overlap) == 0.0) throw DomainError("gauge_fix of a zero field");
  const Complex rotate = std::conj(overlap) / std::abs(overlap);

  std::array<Complex, 3> moment{};
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.unflatten(f);
    const double d = std::norm(u[f]);
    for (std::size_t j = 0; j < g.rank(); ++j)
      moment[j] += d * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(idx[j]) / g.dim(j));
  }
  std::array<std::ptrdiff_t, 3> shift{0, 0, 0};
  for (std::size_t j = 0; j < g.rank(); ++j) {
    if (std::abs(moment[j]) == 0.0) continue;
    const double centroid = std::arg(moment[j]) / (2.0 * std::numbers::pi) * g.dim(j);  // in grid points
    shift[j] = static_cast<std::ptrdiff_t>(std::lround(centroid)) - static_cast<std::ptrdiff_t>(g.dim(j) / 2);
  }
  auto out = translate(u, shift);
  out *= rotate;
  return out;
}

namespace detail {

struct FlowState {
  ComplexField u;
  RealField potential;  // W = (V * G(|u|)) F(|u|)
  EnergyBreakdown energy;
  double kappa = 0.0;
  double residual = 0.0;      // normalized by ||u||_{H^s}
  double residual_abs = 0.0;  // ||r||_2
};

inline FlowState evaluate_state(ComplexField u, const PhysicsParams& /*params*/, const NonlinearitySpec& spec,
                                const RieszKernelPlan& plan, const std::vector<double>& symbol) {
  FlowState st{std::move(u), RealField(), {}, 0.0, 0.0, 0.0};
  const Grid& g = st.u.grid();
  const double dv = g.cell_volume();
  auto hat = to_spectrum(st.u);
  double kin2 = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) kin2 += symbol[i] * std::norm(hat[i]);
  kin2 *= parseval_weight(g);

  st.energy.mass = mass(st.u);
  st.energy.kinetic = 0.5 * kin2;
  RealField conv(g);
  if (!spec.is_linear()) {
    const auto dens = density(st.u, spec);
    conv = riesz_convolve(dens, plan);
    st.energy.interaction = 0.5 * l2_inner(dens, conv);
  }
  st.energy.total = st.energy.kinetic - st.energy.interaction;
  st.potential = RealField(g);
  double pairing = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    st.potential[i] = spec.is_linear() ? 0.0 : conv[i] * evaluate_F(std::abs(st.u[i]), spec);
    pairing += st.potential[i] * std::norm(st.u[i]);
  }
  pairing *= dv;
  st.kappa = (kin2 - pairing) / st.energy.mass;

  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= symbol[i];
  fft::inverse(g.dims(), hat);
  double r2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r2 += std::norm(hat[i] - st.kappa * st.u[i] - st.potential[i] * st.u[i]);
  st.residual_abs = std::sqrt(r2 * dv);
  st.residual = st.residual_abs / std::sqrt(st.energy.mass + kin2);
  return st;
}

}  // namespace detail

/// Minimizes E over the sphere ||u||_2^2 = lambda by the semi-implicit normalized gradient flow
///   u* = F^{-1}[(u_hat + step (N(u) + kappa u)_hat) / (1 + step |k|^{2s})],  u <- sqrt(lambda) u*/||u*||,
/// with kappa the current Lagrange multiplier (treated implicitly when negative).
/// Stops when ||u^{n+1} - u^n|| / (step ||u^n||) < tol and the normalized Euler-Lagrange
/// residual is below 10 tol. The step is halved (at most `max_halvings` times) whenever an
/// iteration past the warm-up raises the energy.
inline GroundStateResult solve_ground_state(const PhysicsParams& params, const NonlinearitySpec& spec,
                                            const RieszKernelPlan& plan, std::optional<ComplexField> init = {},
                                            SolverOptions options = {}) {
  const Grid& g = plan.grid();
  if (options.check_admissibility) {
    const auto report = validate_existence(params, spec);
    if (!report.existence_ok || !report.negative_energy_ok)
      throw DomainError("configuration is not admissible for ground-state search (existence/negative-energy windows)");
  }
  if (!(params.lambda > 0.0)) throw DomainError("mass constraint must be positive");

  ComplexField u = init ? *init : default_initial_state(g, params.lambda);
  if (!(u.grid() == g)) throw GridMismatch("initial state and kernel plan");
  const double m0 = mass(u);
  if (!(m0 > 0.0)) throw DomainError("initial state has zero mass");
  u *= std::sqrt(params.lambda / m0);

  double tau = options.step > 0.0 ? options.step : default_step(g, params.s);
  const auto symbol = g.fractional_symbol(params.s);
  const double dv = g.cell_volume();

  GroundStateResult result;
  auto st = detail::evaluate_state(std::move(u), params, spec, plan, symbol);
  auto record = [&](std::size_t iter, const detail::FlowState& s) {
    result.history.push_back({iter, s.energy, s.residual, s.kappa});
  };
  record(0, st);

  std::size_t halvings = 0;
  std::size_t iter = 0;
  while (iter < options.max_iters) {
    auto hat = to_spectrum(st.u);
    ComplexField nonlinear(g);
    for (std::size_t i = 0; i < g.size(); ++i) nonlinear[i] = st.potential[i] * st.u[i];
    const auto nhat = to_spectrum(nonlinear);
    // The multiplier term makes exact Euler-Lagrange solutions fixed points for every step size;
    // a negative multiplier is moved into the implicit part so the denominator stays >= 1.
    const double shift = std::max(0.0, -st.kappa);
    const double explicit_kappa = st.kappa + shift;
    for (std::size_t i = 0; i < hat.size(); ++i)
      hat[i] = (hat[i] * (1.0 + tau * explicit_kappa) + tau * nhat[i]) / (1.0 + tau * (symbol[i] + shift));
    auto next = from_spectrum(g, std::move(hat));
    const double mn = mass(next);
    if (!(mn > 0.0) || !std::isfinite(mn)) throw SolverError("gradient flow produced a degenerate state");
    next *= std::sqrt(params.lambda / mn);

    double change = 0.0;
    double amax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      change += std::norm(next[i] - st.u[i]);
      amax = std::max(amax, std::abs(next[i]));
    }
    change = std::sqrt(change * dv) / (tau * std::sqrt(params.lambda));
    if (amax > options.amplitude_ceiling || !std::isfinite(amax))
      throw SolverError("amplitude exceeded ceiling (" + std::to_string(amax) +
                        "): configuration looks supercritical or ill-posed");

    auto trial = detail::evaluate_state(std::move(next), params, spec, plan, symbol);
    if (trial.energy.total < options.energy_floor)
      throw SolverError("energy fell below floor (" + std::to_string(trial.energy.total) +
                        "): configuration looks supercritical or ill-posed");

    const double slack = 1e-12 * std::max(1.0, std::abs(st.energy.total));
    if (iter >= options.warmup && trial.energy.total > st.energy.total + slack && halvings < options.max_halvings) {
      tau *= 0.5;
      ++halvings;
      continue;
    }
    ++iter;
    st = std::move(trial);
    const bool done = change < options.tol && st.residual < 10.0 * options.tol;
    if (done || iter % options.history_stride == 0 || iter == options.max_iters) record(iter, st);
    if (done) {
      result.converged = true;
      break;
    }
  }

  result.iterations = iter;
  result.final_step = tau;
  result.state = gauge_fix(st.u);
  result.kappa = st.kappa;
  result.energy = st.energy;
  result.el_residual = st.residual;
  result.energy_uncertainty = st.residual_abs * std::sqrt(params.lambda);
  result.boundary_mass_fraction = boundary_mass_fraction(result.state);
  if (result.boundary_mass_fraction > options.boundary_tolerance)
    result.warnings.push_back("mass fraction " + std::to_string(result.boundary_mass_fraction) +
                              " in the outer 10% shell exceeds tolerance; enlarge the box");
  if (!result.converged) result.warnings.push_back("not converged within max_iters");
  return result;
}

/// Solver diagnostics for a stored state such as a snapshot. `converged` means the
/// normalized residual is below 10 tol, the solver's own acceptance level.
inline GroundStateResult describe_state(const ComplexField& u, const PhysicsParams& params,
                                        const NonlinearitySpec& spec, const RieszKernelPlan& plan, double tol) {
  require_same_grid(u.grid(), plan.grid());
  const auto st = detail::evaluate_state(u, params, spec, plan, u.grid().fractional_symbol(params.s));
  GroundStateResult r;
  r.state = u;
  r.kappa = st.kappa;
  r.energy = st.energy;
  r.el_residual = st.residual;
  r.energy_uncertainty = st.residual_abs * std::sqrt(st.energy.mass);
  r.converged = st.residual < 10.0 * tol;
  r.boundary_mass_fraction = boundary_mass_fraction(u);
  return r;
}

struct CurvePoint {
  double lambda = 0.0;
  double energy = 0.0;
  double kappa = 0.0;
  double el_residual = 0.0;
  double energy_uncertainty = 0.0;
  bool converged = false;
};

struct MassEnergyCurve {
  std::vector<CurvePoint> points;
  /// Set when a solve failed; `points` then holds the results obtained before the failure.
  std::optional<std::string> error;

  const CurvePoint* find(double lambda, double rel_tol = 1e-9) const {
    for (const auto& p : points)
      if (std::abs(p.lambda - lambda) <= rel_tol * std::max(1.0, std::abs(lambda))) return &p;
    return nullptr;
  }
};

/// Samples lambda -> I_lambda, warm-starting each solve from the previous minimizer multiplied
/// by sqrt(lambda_new / lambda_old).
inline MassEnergyCurve mass_energy_curve(PhysicsParams params, const NonlinearitySpec& spec,
                                         const RieszKernelPlan& plan, const std::vector<double>& lambdas,
                                         const SolverOptions& options = {}) {
  MassEnergyCurve curve;
  std::optional<ComplexField> warm;
  double previous = 0.0;
  for (double lambda : lambdas) {
    try {
      if (warm) *warm *= std::sqrt(lambda / previous);
      params.lambda = lambda;
      auto gs = solve_ground_state(params, spec, plan, warm, options);
      curve.points.push_back({lambda, gs.energy.total, gs.kappa, gs.el_residual, gs.energy_uncertainty, gs.converged});
      warm = std::move(gs.state);
      previous = lambda;
    } catch (const Error& e) {
      curve.error = "lambda=" + std::to_string(lambda) + ": " + e.what();
      break;
    }
  }
  return curve;
}

}  // namespace fnls
