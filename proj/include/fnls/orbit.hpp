#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <tuple>
#include <utility>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/grid.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

struct OrbitDistanceResult {
  /// inf over sigma and translations y of ||phi - e^{i sigma} w(. + y)||_{H^s}.
  double distance = 0.0;
  /// Best grid translation (grid points per axis).
  std::array<std::ptrdiff_t, 3> best_shift{0, 0, 0};
  /// Additional sub-grid translation in physical units (zero unless refinement is enabled).
  std::array<double, 3> subgrid_offset{0.0, 0.0, 0.0};
  double best_phase = 0.0;
};

struct OrbitOptions {
  /// Also search the 3^N neighbourhood of the correlation peak by H^s distance.
  bool refine_neighborhood = true;
  /// Continue with a continuous (spectral) translation search inside one cell of the best shift.
  bool subgrid = false;
};

namespace detail {

// Spectral pieces shared by every candidate translation: c_k = weight_k phi_hat conj(w_hat).
struct OrbitSpectra {
  std::vector<Complex> phi_hat, w_hat;
  std::vector<double> weight;  // (1 + |k|^{2s}) * Parseval weight
};

inline OrbitSpectra orbit_spectra(const ComplexField& phi, const ComplexField& w, double s) {
  OrbitSpectra sp{to_spectrum(phi), to_spectrum(w), phi.grid().fractional_symbol(s)};
  const double pw = parseval_weight(phi.grid());
  for (double& v : sp.weight) v = (1.0 + v) * pw;
  return sp;
}

// Phase factor of w(. + y) in Fourier space for a physical offset y.
inline Complex shift_factor(const Grid& g, std::size_t f, const std::array<double, 3>& y) {
  const auto idx = g.unflatten(f);
  double phase = 0.0;
  for (std::size_t j = 0; j < g.rank(); ++j) phase += g.wavenumber(j, idx[j]) * y[j];
  return std::polar(1.0, phase);
}

inline std::array<double, 3> to_offset(const Grid& g, const std::array<std::ptrdiff_t, 3>& shift,
                                       const std::array<double, 3>& sub) {
  std::array<double, 3> y{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < g.rank(); ++j) y[j] = static_cast<double>(shift[j]) * g.spacing(j) + sub[j];
  return y;
}

// <phi, w(. + y)>_{H^s}.
inline Complex orbit_pairing(const Grid& g, const OrbitSpectra& sp, const std::array<double, 3>& y) {
  Complex acc = 0.0;
  for (std::size_t f = 0; f < sp.phi_hat.size(); ++f)
    acc += sp.weight[f] * sp.phi_hat[f] * std::conj(sp.w_hat[f] * shift_factor(g, f, y));
  return acc;
}

inline double orbit_residual(const Grid& g, const OrbitSpectra& sp, const std::array<double, 3>& y, Complex rot) {
  double acc = 0.0;
  for (std::size_t f = 0; f < sp.phi_hat.size(); ++f)
    acc += sp.weight[f] * std::norm(sp.phi_hat[f] - rot * sp.w_hat[f] * shift_factor(g, f, y));
  return std::sqrt(acc);
}

}  // namespace detail

/// H^s distance from phi to the orbit {e^{i sigma} w(. + y)}.
///
/// The translation is the peak of the L2 cross-correlation over all grid shifts (one FFT),
/// optionally refined over its 3^N neighbourhood and within a cell; for a fixed translation
/// the optimal phase is sigma = arg <phi, w(. + y)>_{H^s} in closed form.
inline OrbitDistanceResult orbit_distance(const ComplexField& phi, const ComplexField& w, double s,
                                          const OrbitOptions& options = {}) {
  phi.require_same_grid(w);
  if (!(mass(w) > 0.0)) throw DomainError("orbit reference must be nonzero");
  const Grid& g = phi.grid();
  const auto sp = detail::orbit_spectra(phi, w, s);

  // corr[m] = sum_x phi(x) conj(w(x - m)); the translation y = -m aligns w(. + y) with phi.
  std::vector<Complex> corr(sp.phi_hat.size());
  for (std::size_t f = 0; f < corr.size(); ++f) corr[f] = sp.phi_hat[f] * std::conj(sp.w_hat[f]);
  fft::inverse(g.dims(), corr);
  std::size_t peak = 0;
  for (std::size_t f = 1; f < corr.size(); ++f)
    if (std::abs(corr[f]) > std::abs(corr[peak])) peak = f;
  std::array<std::ptrdiff_t, 3> best{0, 0, 0};
  {
    const auto idx = g.unflatten(peak);
    for (std::size_t j = 0; j < g.rank(); ++j) {
      const auto n = static_cast<std::ptrdiff_t>(g.dim(j));
      auto y = -static_cast<std::ptrdiff_t>(idx[j]);
      if (y < -n / 2) y += n;
      best[j] = y;
    }
  }

  auto evaluate = [&](const std::array<std::ptrdiff_t, 3>& shift, const std::array<double, 3>& sub) {
    const auto y = detail::to_offset(g, shift, sub);
    const Complex p = detail::orbit_pairing(g, sp, y);
    const double sigma = std::abs(p) > 0.0 ? std::arg(p) : 0.0;
    return std::pair{detail::orbit_residual(g, sp, y, std::polar(1.0, sigma)), sigma};
  };

  OrbitDistanceResult result;
  result.best_shift = best;
  std::tie(result.distance, result.best_phase) = evaluate(best, {0.0, 0.0, 0.0});

  if (options.refine_neighborhood) {
    const std::size_t count = static_cast<std::size_t>(std::pow(3, g.rank()));
    const auto center = best;
    for (std::size_t c = 0; c < count; ++c) {
      std::array<std::ptrdiff_t, 3> cand = center;
      std::size_t rest = c;
      for (std::size_t j = 0; j < g.rank(); ++j) {
        cand[j] += static_cast<std::ptrdiff_t>(rest % 3) - 1;
        rest /= 3;
      }
      if (cand == center) continue;
      const auto [d, sigma] = evaluate(cand, {0.0, 0.0, 0.0});
      if (d < result.distance) {
        result.distance = d;
        result.best_phase = sigma;
        result.best_shift = cand;
      }
    }
  }

  if (options.subgrid) {
    // Coordinate-wise golden-section search of |pairing| inside [-h, h] per axis.
    std::array<double, 3> sub{0.0, 0.0, 0.0};
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    auto score = [&](const std::array<double, 3>& cand) {
      return -std::abs(detail::orbit_pairing(g, sp, detail::to_offset(g, result.best_shift, cand)));
    };
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t j = 0; j < g.rank(); ++j) {
        double a = -g.spacing(j), b = g.spacing(j);
        auto at = [&](double t) {
          auto c = sub;
          c[j] = t;
          return score(c);
        };
        double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
        double f1 = at(x1), f2 = at(x2);
        for (int it = 0; it < 60 && b - a > 1e-12 * g.spacing(j); ++it) {
          if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = at(x1);
          } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = at(x2);
          }
        }
        sub[j] = 0.5 * (a + b);
      }
    }
    const auto [d, sigma] = evaluate(result.best_shift, sub);
    if (d < result.distance) {
      result.distance = d;
      result.best_phase = sigma;
      result.subgrid_offset = sub;
    }
  }
  return result;
}

inline OrbitDistanceResult orbit_distance(const ComplexField& phi, const RealField& w, double s,
                                          const OrbitOptions& options = {}) {
  return orbit_distance(phi, to_complex(w), s, options);
}

}  // namespace fnls
