#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/functionals.hpp"
#include "fnls/grid.hpp"
#include "fnls/model.hpp"
#include "fnls/orbit.hpp"
#include "fnls/riesz.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

struct TrajectoryRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy_J = 0.0;
  double linf = 0.0;
  std::optional<double> orbit_distance;
  /// arg <u_ref, phi> = arg int conj(u_ref) phi.
  std::optional<double> overlap_phase;
};

/// 0.01 (pi / k_max)^{2s} times `safety`, with k_max the largest axis Nyquist wavenumber.
inline double default_time_step(const Grid& grid, double s, double safety = 1.0) {
  return 0.01 * std::pow(grid.min_spacing(), 2.0 * s) * safety;
}

namespace detail {

// phi <- e^{-i t W} phi. |phi| is invariant along i d_t phi = W phi, so freezing W is exact.
inline void nonlinear_flow(ComplexField& phi, const RealField& w, double t) {
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= std::polar(1.0, -t * w[i]);
}

// phi_hat <- e^{i t |k|^{2s}} phi_hat.
inline void linear_flow(ComplexField& phi, const std::vector<double>& symbol, double t) {
  auto& v = phi.data();
  fft::forward(phi.grid().dims(), v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, t * symbol[i]);
  fft::inverse(phi.grid().dims(), v);
}

inline void require_finite(const ComplexField& phi, double t) {
  if (!phi.all_finite()) throw SolverError("non-finite field at t=" + std::to_string(t));
}

}  // namespace detail

/// One Strang step (half nonlinear, full linear, half nonlinear). Negative dt runs backwards.
/// Throws SolverError on NaN/Inf; the input is left untouched in that case.
inline ComplexField step_strang(const ComplexField& phi, double dt, const PhysicsParams& params,
                                const NonlinearitySpec& spec, const RieszKernelPlan& plan) {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw DomainError("time step must be nonzero and finite");
  require_fractional_order(params.s);
  require_same_grid(phi.grid(), plan.grid());
  ComplexField out = phi;
  detail::nonlinear_flow(out, hartree_potential(out, spec, plan), 0.5 * dt);
  detail::linear_flow(out, phi.grid().fractional_symbol(params.s), dt);
  detail::nonlinear_flow(out, hartree_potential(out, spec, plan), 0.5 * dt);
  detail::require_finite(out, dt);
  return out;
}

struct EvolveOptions {
  std::size_t record_stride = 1;
  /// Optional ground state for orbit distance and overlap phase.
  std::optional<ComplexField> reference;
  OrbitOptions orbit;
  /// Called with each record as soon as it is computed.
  std::function<void(const TrajectoryRecord&)> on_record;
  /// Called with (step index, time, state) every `dump_every` steps when both are set.
  std::size_t dump_every = 0;
  std::function<void(std::size_t, double, const ComplexField&)> on_dump;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  /// Last state that passed the finiteness check.
  ComplexField final_state;
  std::size_t steps = 0;
  double dt = 0.0;
  /// Set when the run aborted; `records` and `final_state` describe the last good step.
  std::optional<std::string> error;
};

inline TrajectoryRecord make_record(double t, const ComplexField& phi, const PhysicsParams& params,
                                    const NonlinearitySpec& spec, const RieszKernelPlan& plan,
                                    const std::optional<ComplexField>& reference, const OrbitOptions& orbit = {}) {
  TrajectoryRecord r;
  r.t = t;
  const auto e = energy(phi, params, spec, plan);
  r.mass = e.mass;
  r.energy_J = e.total;
  for (const auto& v : phi.values()) r.linf = std::max(r.linf, std::abs(v));
  if (reference) {
    r.orbit_distance = orbit_distance(phi, *reference, params.s, orbit).distance;
    r.overlap_phase = std::arg(l2_inner(phi, *reference));
  }
  return r;
}

/// Integrates phi0 over [0, T] with round(T/dt) Strang steps of size T/steps.
///
/// Consecutive nonlinear half-steps are merged into one full step, except at recording and
/// dump points where the state is synchronized. The potential W depends on |phi| only, so a
/// synchronized state reuses the same W for the next opening half-step.
inline Trajectory evolve(const ComplexField& phi0, double T, double dt, const PhysicsParams& params,
                         const NonlinearitySpec& spec, const RieszKernelPlan& plan, const EvolveOptions& options = {}) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("final time must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  if (options.record_stride == 0) throw DomainError("record stride must be positive");
  require_fractional_order(params.s);
  require_same_grid(phi0.grid(), plan.grid());
  if (options.reference) require_same_grid(phi0.grid(), options.reference->grid());

  Trajectory traj;
  traj.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
  traj.dt = T / static_cast<double>(traj.steps);
  const double h = traj.dt;
  const auto symbol = phi0.grid().fractional_symbol(params.s);

  auto emit = [&](double t, const ComplexField& phi) {
    traj.records.push_back(make_record(t, phi, params, spec, plan, options.reference, options.orbit));
    if (options.on_record) options.on_record(traj.records.back());
  };

  ComplexField phi = phi0;
  traj.final_state = phi0;
  emit(0.0, phi);
  try {
    auto w = hartree_potential(phi, spec, plan);
    detail::nonlinear_flow(phi, w, 0.5 * h);
    for (std::size_t n = 1; n <= traj.steps; ++n) {
      const double t = static_cast<double>(n) * h;
      detail::linear_flow(phi, symbol, h);
      detail::require_finite(phi, t);
      w = hartree_potential(phi, spec, plan);
      const bool recording = n % options.record_stride == 0 || n == traj.steps;
      const bool dumping = options.on_dump && options.dump_every > 0 && n % options.dump_every == 0;
      if (recording || dumping) {
        detail::nonlinear_flow(phi, w, 0.5 * h);
        detail::require_finite(phi, t);
        traj.final_state = phi;
        if (recording) emit(t, phi);
        if (dumping) options.on_dump(n, t, phi);
        if (n < traj.steps) detail::nonlinear_flow(phi, w, 0.5 * h);
      } else {
        detail::nonlinear_flow(phi, w, h);
      }
    }
  } catch (const Error& e) {
    traj.error = e.what();
  }
  return traj;
}

}  // namespace fnls
