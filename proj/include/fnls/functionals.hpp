#pragma once

#include <cmath>
#include <complex>

#include "fnls/errors.hpp"
#include "fnls/grid.hpp"
#include "fnls/model.hpp"
#include "fnls/riesz.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

/// E(u) = kinetic - interaction with kinetic = 1/2 ||(-Delta)^{s/2} u||^2 and
/// interaction = 1/2 D(G(|u|), G(|u|)). For complex fields this is the complex energy J.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double interaction = 0.0;
  double total = 0.0;
  double mass = 0.0;
};

/// G(|u|) pointwise.
template <typename T>
RealField density(const Field<T>& u, const NonlinearitySpec& spec) {
  RealField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = evaluate_G(std::abs(u[i]), spec);
  return out;
}

/// D(a, b) = int a(x) (V * b)(x) dx for nonnegative a, b.
inline double interaction_D(const RealField& a, const RealField& b, const RieszKernelPlan& plan) {
  a.require_same_grid(b);
  return l2_inner(a, riesz_convolve(b, plan));
}

/// Real potential W = (V * G(|u|)) F(|u|), so that the Euler-Lagrange nonlinearity is W u.
template <typename T>
RealField hartree_potential(const Field<T>& u, const NonlinearitySpec& spec, const RieszKernelPlan& plan) {
  RealField w(u.grid());
  if (spec.is_linear()) return w;
  w = riesz_convolve(density(u, spec), plan);
  for (std::size_t i = 0; i < u.size(); ++i) w[i] *= evaluate_F(std::abs(u[i]), spec);
  return w;
}

/// N(u) = (V * G(|u|)) F(|u|) u.
template <typename T>
Field<T> el_operator(const Field<T>& u, const NonlinearitySpec& spec, const RieszKernelPlan& plan) {
  const auto w = hartree_potential(u, spec, plan);
  Field<T> out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = w[i] * u[i];
  return out;
}

template <typename T>
EnergyBreakdown energy(const Field<T>& u, const PhysicsParams& params, const NonlinearitySpec& spec,
                       const RieszKernelPlan& plan) {
  EnergyBreakdown e;
  e.mass = mass(u);
  e.kinetic = 0.5 * kinetic(u, params.s);
  if (!spec.is_linear()) {
    const auto g = density(u, spec);
    e.interaction = 0.5 * interaction_D(g, g, plan);
  }
  e.total = e.kinetic - e.interaction;
  return e;
}

/// L2 gradient of E at a real field: (-Delta)^s u - N(u).
inline RealField energy_gradient(const RealField& u, const PhysicsParams& params, const NonlinearitySpec& spec,
                                 const RieszKernelPlan& plan) {
  auto grad = frac_laplacian(u, params.s);
  grad -= el_operator(u, spec, plan);
  return grad;
}

/// kappa = (||(-Delta)^{s/2} u||^2 - Re <N(u), u>) / ||u||^2, the multiplier of
/// (-Delta)^s u - kappa u = N(u).
template <typename T>
double lagrange_multiplier(const Field<T>& u, const PhysicsParams& params, const NonlinearitySpec& spec,
                           const RieszKernelPlan& plan) {
  const double m = mass(u);
  if (!(m > 0.0)) throw DomainError("lagrange multiplier of a zero-mass field");
  const auto n = el_operator(u, spec, plan);
  double pairing = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) pairing += std::real(n[i] * std::conj(u[i]));
  pairing *= u.grid().cell_volume();
  return (kinetic(u, params.s) - pairing) / m;
}

/// (-Delta)^s u - kappa u - N(u).
inline ComplexField el_residual(const ComplexField& u, double kappa, const PhysicsParams& params,
                                const NonlinearitySpec& spec, const RieszKernelPlan& plan) {
  auto r = frac_laplacian(u, params.s);
  const auto n = el_operator(u, spec, plan);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] -= kappa * u[i] + n[i];
  return r;
}

}  // namespace fnls
