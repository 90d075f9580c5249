#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/fft.hpp"
#include "fnls/grid.hpp"

namespace fnls {

/// Unnormalized DFT coefficients of u (flat row-major order, FFT ordering).
inline std::vector<Complex> to_spectrum(const ComplexField& u) {
  std::vector<Complex> hat(u.data());
  fft::forward(u.grid().dims(), hat);
  return hat;
}

inline std::vector<Complex> to_spectrum(const RealField& u) {
  std::vector<Complex> hat(u.data().begin(), u.data().end());
  fft::forward(u.grid().dims(), hat);
  return hat;
}

inline ComplexField from_spectrum(const Grid& grid, std::vector<Complex> hat) {
  fft::inverse(grid.dims(), hat);
  return ComplexField(grid, std::move(hat));
}

/// Weight turning sum_k |u_hat_k|^2 into the integral of |u|^2 (Parseval for the unnormalized DFT).
inline double parseval_weight(const Grid& grid) {
  const double n = static_cast<double>(grid.size());
  return grid.cell_volume() / n;
}

/// Multiplies the spectrum of u by a real symbol given per Fourier mode.
inline ComplexField apply_symbol(const ComplexField& u, const std::vector<double>& symbol) {
  auto hat = to_spectrum(u);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= symbol[i];
  return from_spectrum(u.grid(), std::move(hat));
}

inline void require_fractional_order(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("fractional order must lie in (0, 1], got " + std::to_string(s));
}

/// (-Delta)^s u through the Fourier multiplier |k|^{2s}; s = 1 gives the spectral Laplacian.
inline ComplexField frac_laplacian(const ComplexField& u, double s) {
  require_fractional_order(s);
  return apply_symbol(u, u.grid().fractional_symbol(s));
}

inline RealField frac_laplacian(const RealField& u, double s) {
  return real_part(frac_laplacian(to_complex(u), s));
}

/// Integral of u conj(v) over the box.
inline Complex l2_inner(const ComplexField& u, const ComplexField& v) {
  u.require_same_grid(v);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * std::conj(v[i]);
  return acc * u.grid().cell_volume();
}

inline double l2_inner(const RealField& u, const RealField& v) {
  u.require_same_grid(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc * u.grid().cell_volume();
}

/// ||u||_2^2.
template <typename T>
double mass(const Field<T>& u) {
  double acc = 0.0;
  for (const auto& v : u.values()) acc += std::norm(v);
  return acc * u.grid().cell_volume();
}

namespace detail {

inline Complex weighted_pairing(const std::vector<Complex>& uh, const std::vector<Complex>& vh,
                                const std::vector<double>& weight, double scale) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) acc += weight[i] * uh[i] * std::conj(vh[i]);
  return acc * scale;
}

}  // namespace detail

/// ||(-Delta)^{s/2} u||_2^2, the homogeneous H^s seminorm squared (no factor 1/2).
template <typename T>
double kinetic(const Field<T>& u, double s) {
  const auto hat = to_spectrum(u);
  const auto sym = u.grid().fractional_symbol(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) acc += sym[i] * std::norm(hat[i]);
  return acc * parseval_weight(u.grid());
}

/// <u, v>_{H^s} = sum_k (1 + |k|^{2s}) u_hat conj(v_hat) times the Parseval weight.
inline Complex hs_inner(const ComplexField& u, const ComplexField& v, double s) {
  u.require_same_grid(v);
  auto sym = u.grid().fractional_symbol(s);
  for (double& w : sym) w += 1.0;
  return detail::weighted_pairing(to_spectrum(u), to_spectrum(v), sym, parseval_weight(u.grid()));
}

template <typename T>
double hs_norm(const Field<T>& u, double s) {
  return std::sqrt(mass(u) + kinetic(u, s));
}

/// Circular shift: out(x) = u(x + shift*h), shift given in grid points per axis.
template <typename T>
Field<T> translate(const Field<T>& u, const std::array<std::ptrdiff_t, 3>& shift) {
  const Grid& g = u.grid();
  Field<T> out(g);
  for (std::size_t f = 0; f < g.size(); ++f) {
    auto idx = g.unflatten(f);
    for (std::size_t j = 0; j < g.rank(); ++j) {
      const auto n = static_cast<std::ptrdiff_t>(g.dim(j));
      auto m = (static_cast<std::ptrdiff_t>(idx[j]) + shift[j]) % n;
      if (m < 0) m += n;
      idx[j] = static_cast<std::size_t>(m);
    }
    out[f] = u[g.flatten(idx)];
  }
  return out;
}

/// Spectral (sub-grid) translation: out(x) = u(x + offset), offset in physical units.
inline ComplexField translate_spectral(const ComplexField& u, const std::array<double, 3>& offset) {
  const Grid& g = u.grid();
  auto hat = to_spectrum(u);
  for (std::size_t f = 0; f < hat.size(); ++f) {
    const auto idx = g.unflatten(f);
    double phase = 0.0;
    bool nyquist = false;
    for (std::size_t j = 0; j < g.rank(); ++j) {
      phase += g.wavenumber(j, idx[j]) * offset[j];
      nyquist = nyquist || idx[j] == g.dim(j) / 2;
    }
    // The Nyquist mode has no well-defined direction; shifting it keeps real fields real only if dropped.
    hat[f] = nyquist ? Complex(0.0) : hat[f] * std::polar(1.0, phase);
  }
  return from_spectrum(g, std::move(hat));
}

/// Fraction of the mass located in the outer 10% shell of the box (|x_j| > 0.4 L_j on any axis).
template <typename T>
double boundary_mass_fraction(const Field<T>& u) {
  const Grid& g = u.grid();
  double shell = 0.0;
  double total = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.unflatten(f);
    bool outer = false;
    for (std::size_t j = 0; j < g.rank(); ++j) outer = outer || std::abs(g.coordinate(j, idx[j])) > 0.4 * g.length(j);
    const double d = std::norm(u[f]);
    total += d;
    if (outer) shell += d;
  }
  return total > 0.0 ? shell / total : 0.0;
}

/// Fraction of the spectral energy carried by modes with |k_j| > 2/3 of the axis Nyquist on any axis.
template <typename T>
double spectral_tail_fraction(const Field<T>& u) {
  const Grid& g = u.grid();
  const auto hat = to_spectrum(u);
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t f = 0; f < hat.size(); ++f) {
    const auto idx = g.unflatten(f);
    bool high = false;
    for (std::size_t j = 0; j < g.rank(); ++j)
      high = high || std::abs(g.wavenumber(j, idx[j])) > (2.0 / 3.0) * std::numbers::pi / g.spacing(j);
    const double e = std::norm(hat[f]);
    total += e;
    if (high) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

struct ResolutionLimits {
  double spectral_tail = 1e-10;
  double boundary_mass = 1e-8;
};

namespace detail {

/// Trigonometric interpolation weights from the n grid points of one axis to the points a*x_i.
inline std::vector<double> dilation_matrix(const Grid& g, std::size_t axis, double a) {
  const std::size_t n = g.dim(axis);
  const double omega = 2.0 * std::numbers::pi / g.length(axis);
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = a * g.coordinate(axis, i);
    // Outside the box the free-space field is taken as zero, not as its periodic copy.
    if (std::abs(y) > 0.5 * g.length(axis)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = omega * (y - g.coordinate(axis, j));
      // Dirichlet kernel 1 + 2 sum_{k<n/2} cos(k d) plus the symmetric Nyquist term.
      double w = std::cos(0.5 * static_cast<double>(n) * d);
      const double sh = std::sin(0.5 * d);
      if (std::abs(sh) > 1e-6) {
        w += std::sin((0.5 * static_cast<double>(n) - 0.5) * d) / sh;
      } else {
        w += 1.0;
        for (std::size_t k = 1; k < n / 2; ++k) w += 2.0 * std::cos(static_cast<double>(k) * d);
      }
      m[i * n + j] = w / static_cast<double>(n);
    }
  }
  return m;
}

/// Applies an n x n matrix along one axis of a row-major array.
inline std::vector<Complex> apply_along_axis(const Grid& g, std::size_t axis, const std::vector<double>& m,
                                             const std::vector<Complex>& in) {
  const std::size_t n = g.dim(axis);
  std::size_t inner = 1;
  for (std::size_t j = axis + 1; j < g.rank(); ++j) inner *= g.dim(j);
  const std::size_t outer = g.size() / (n * inner);
  std::vector<Complex> out(in.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t c = 0; c < inner; ++c) {
      const std::size_t base = o * n * inner + c;
      for (std::size_t i = 0; i < n; ++i) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += m[i * n + j] * in[base + j * inner];
        out[base + i * inner] = acc;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Mass-preserving dilation u_kappa(x) = kappa^{1/2} u(kappa^{1/N} x), evaluated by band-limited
/// interpolation on the same grid.
///
/// Throws ResolutionError when either the input or the result is not resolved (spectral tail)
/// or not decayed inside the box (boundary shell mass).
inline ComplexField dilate(const ComplexField& u, double kappa, const ResolutionLimits& limits = {}) {
  if (!(kappa > 0.0)) throw DomainError("dilation factor must be positive");
  const Grid& g = u.grid();
  auto check = [&](const ComplexField& f, const char* which) {
    const double tail = spectral_tail_fraction(f);
    if (tail > limits.spectral_tail)
      throw ResolutionError(std::string(which) + " field under-resolved: spectral tail " + std::to_string(tail));
    const double shell = boundary_mass_fraction(f);
    if (shell > limits.boundary_mass)
      throw ResolutionError(std::string(which) + " field not decayed in box: shell mass fraction " +
                            std::to_string(shell));
  };
  check(u, "input");
  if (kappa == 1.0) return u;

  const double a = std::pow(kappa, 1.0 / static_cast<double>(g.rank()));
  std::vector<Complex> values(u.data());
  for (std::size_t j = 0; j < g.rank(); ++j)
    values = detail::apply_along_axis(g, j, detail::dilation_matrix(g, j, a), values);
  const double amp = std::sqrt(kappa);
  for (auto& v : values) v *= amp;
  ComplexField out(g, std::move(values));
  check(out, "dilated");
  return out;
}

inline RealField dilate(const RealField& u, double kappa, const ResolutionLimits& limits = {}) {
  return real_part(dilate(to_complex(u), kappa, limits));
}

}  // namespace fnls
