#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <math.h>
#include <numbers>
#include <string>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/fft.hpp"
#include "fnls/grid.hpp"

namespace fnls {

/// How the Riesz kernel |x|^{beta-N} is discretized on the zero-padded grid.
enum class KernelRule {
  /// Point samples of the kernel; the singular origin cell takes the kernel average over the
  /// ball whose volume equals one grid cell. First-order accurate near the singularity.
  CellAverage,
  /// Kernel truncated at radius R (beyond the box diameter) and transformed analytically; the
  /// real-space samples are the band-limited truncated kernel. Spectrally accurate for
  /// resolved densities.
  Spectral,
};

inline const char* to_string(KernelRule r) { return r == KernelRule::CellAverage ? "cell-average" : "spectral"; }

namespace detail {

/// Surface area of the unit sphere in R^N.
inline double sphere_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

/// Volume of the unit ball in R^N.
inline double ball_volume(int n) { return sphere_area(n) / n; }

/// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace detail

/// H(X) = int_0^X t^{beta-1} A_N(t) dt, where A_N is the angular average of e^{-i k.x} times
/// the sphere area: 2 cos t (N=1), 2 pi J0(t) (N=2), 4 pi sin(t)/t (N=3).
///
/// The Fourier transform of the kernel truncated at radius R is then k^{-beta} H(kR).
class RadialKernelTransform {
 public:
  RadialKernelTransform(int dimension, double beta, double x_max)
      : n_(dimension), beta_(beta) {
    detail::gauss_legendre(kOrder, nodes_, weights_);
    const auto panels = static_cast<std::size_t>(std::ceil(std::max(0.0, x_max - kSeriesLimit) / kPanel)) + 1;
    table_.resize(panels + 1);
    table_[0] = series(kSeriesLimit);
    for (std::size_t j = 0; j < panels; ++j) {
      const double a = kSeriesLimit + kPanel * static_cast<double>(j);
      table_[j + 1] = table_[j] + panel(a, a + kPanel);
    }
  }

  double operator()(double x) const {
    if (x <= kSeriesLimit) return series(x);
    const auto j = static_cast<std::size_t>((x - kSeriesLimit) / kPanel);
    if (j + 1 >= table_.size()) throw DomainError("radial transform evaluated beyond its table");
    const double a = kSeriesLimit + kPanel * static_cast<double>(j);
    return table_[j] + panel(a, x);
  }

  double angular(double t) const {
    switch (n_) {
      case 1: return 2.0 * std::cos(t);
      case 2: return 2.0 * std::numbers::pi * ::j0(t);  // POSIX; far faster than std::cyl_bessel_j
      default: return t == 0.0 ? 4.0 * std::numbers::pi : 4.0 * std::numbers::pi * std::sin(t) / t;
    }
  }

 private:
  static constexpr int kOrder = 20;
  static constexpr double kSeriesLimit = 2.0;
  static constexpr double kPanel = 0.5;

  double series(double x) const {
    if (x == 0.0) return 0.0;
    double sum = 0.0;
    const double x2 = x * x;
    double coef = detail::sphere_area(n_);  // a_0
    double xp = std::pow(x, beta_);
    for (int m = 0; m < 40; ++m) {
      const double term = coef * xp / (2.0 * m + beta_);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      // a_{m+1}/a_m for each angular function's even Taylor series.
      double ratio = 0.0;
      switch (n_) {
        case 1: ratio = -1.0 / ((2.0 * m + 1.0) * (2.0 * m + 2.0)); break;
        case 2: ratio = -1.0 / (4.0 * (m + 1.0) * (m + 1.0)); break;
        default: ratio = -1.0 / ((2.0 * m + 2.0) * (2.0 * m + 3.0)); break;
      }
      coef *= ratio;
      xp *= x2;
    }
    return sum;
  }

  double panel(double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < kOrder; ++i) {
      const double t = mid + half * nodes_[i];
      acc += weights_[i] * std::pow(t, beta_ - 1.0) * angular(t);
    }
    return acc * half;
  }

  int n_;
  double beta_;
  std::vector<double> nodes_, weights_, table_;
};

/// Precomputed transform of the Riesz kernel |x|^{beta-N} on the grid zero-padded to twice its
/// size per axis. Convolutions through the plan are free-space (aperiodic) convolutions.
///
/// Immutable after construction; share freely between threads.
class RieszKernelPlan {
 public:
  RieszKernelPlan(Grid grid, double beta, KernelRule rule = KernelRule::Spectral)
      : grid_(std::move(grid)), beta_(beta), rule_(rule) {
    const int n = static_cast<int>(grid_.rank());
    if (!(beta_ > 0.0 && beta_ < n)) throw DomainError("kernel exponent must satisfy 0 < beta < N");
    for (std::size_t j = 0; j < grid_.rank(); ++j) padded_.push_back(2 * grid_.dim(j));

    std::size_t padded_total = 1;
    for (auto m : padded_) padded_total *= m;
    kernel_.assign(padded_total, 0.0);
    if (rule_ == KernelRule::CellAverage) {
      fill_cell_average();
    } else {
      fill_spectral();
    }

    std::vector<Complex> hat(fft::half_spectrum_size(padded_));
    fft::forward_real(padded_, kernel_, hat);
    kernel_hat_.resize(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) kernel_hat_[i] = hat[i].real();
  }

  const Grid& grid() const { return grid_; }
  double beta() const { return beta_; }
  KernelRule rule() const { return rule_; }
  const std::vector<std::size_t>& padded_dims() const { return padded_; }
  /// Real-space kernel samples on the padded grid, offset d stored at index d mod 2n.
  const std::vector<double>& kernel_samples() const { return kernel_; }
  const std::vector<double>& kernel_transform() const { return kernel_hat_; }
  double origin_value() const { return kernel_[0]; }
  /// Truncation radius of the spectral rule (0 for the cell-average rule).
  double truncation_radius() const { return radius_; }

  /// Kernel value used for a displacement of `offset` grid points per axis (|offset_j| < n_j).
  double kernel_at(const std::array<std::ptrdiff_t, 3>& offset) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < grid_.rank(); ++j) {
      const auto m = static_cast<std::ptrdiff_t>(padded_[j]);
      auto i = offset[j] % m;
      if (i < 0) i += m;
      flat = flat * padded_[j] + static_cast<std::size_t>(i);
    }
    return kernel_[flat];
  }

  /// Kernel average over the ball with the volume of one grid cell centred at the origin.
  static double cell_ball_average(const Grid& g, double beta) {
    const int n = static_cast<int>(g.rank());
    const double dv = g.cell_volume();
    const double rho = std::pow(dv / detail::ball_volume(n), 1.0 / n);
    return detail::sphere_area(n) * std::pow(rho, beta) / (beta * dv);
  }

 private:
  // Calls fn(flat_index_in_padded, offset) for every padded point; offsets lie in [-n_j, n_j).
  template <typename Fn>
  void for_each_offset(Fn&& fn) const {
    std::size_t total = 1;
    for (auto m : padded_) total *= m;
    std::array<std::ptrdiff_t, 3> off{0, 0, 0};
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t rest = f;
      for (std::size_t j = grid_.rank(); j-- > 0;) {
        const auto i = static_cast<std::ptrdiff_t>(rest % padded_[j]);
        rest /= padded_[j];
        const auto n = static_cast<std::ptrdiff_t>(grid_.dim(j));
        off[j] = i >= n ? i - 2 * n : i;
      }
      fn(f, off);
    }
  }

  void fill_cell_average() {
    const int n = static_cast<int>(grid_.rank());
    for_each_offset([&](std::size_t f, const std::array<std::ptrdiff_t, 3>& off) {
      double r2 = 0.0;
      for (std::size_t j = 0; j < grid_.rank(); ++j) r2 += std::pow(static_cast<double>(off[j]) * grid_.spacing(j), 2);
      kernel_[f] = r2 > 0.0 ? std::pow(r2, 0.5 * (beta_ - n)) : cell_ball_average(grid_, beta_);
    });
  }

  // The kernel truncated at R is transformed analytically, sampled on a periodic grid of period
  // P_j >= R + L_j, brought back to real space with an even (DCT-I) transform and restricted to
  // the offsets a 2x-padded convolution needs.
  void fill_spectral() {
    const int n = static_cast<int>(grid_.rank());
    double diameter2 = 0.0;
    for (double l : grid_.lengths()) diameter2 += l * l;
    radius_ = 1.1 * std::sqrt(diameter2);

    std::vector<std::size_t> half_dims;  // DCT-I sizes M_j/2 + 1
    std::vector<double> periods;
    for (std::size_t j = 0; j < grid_.rank(); ++j) {
      const double h = grid_.spacing(j);
      const auto m = 2 * static_cast<std::size_t>(std::ceil((radius_ + grid_.length(j)) / (2.0 * h))) + 2;
      half_dims.push_back(m / 2 + 1);
      periods.push_back(static_cast<double>(m) * h);
    }
    std::size_t total = 1;
    double k_max2 = 0.0;
    for (std::size_t j = 0; j < half_dims.size(); ++j) {
      total *= half_dims[j];
      k_max2 += std::pow(2.0 * std::numbers::pi / periods[j] * static_cast<double>(half_dims[j] - 1), 2);
    }
    RadialKernelTransform transform(n, beta_, std::sqrt(k_max2) * radius_ + 1.0);
    const double g0 = detail::sphere_area(n) * std::pow(radius_, beta_) / beta_;

    std::vector<double> symbol(total);
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t rest = f;
      double k2 = 0.0;
      for (std::size_t j = half_dims.size(); j-- > 0;) {
        const double i = static_cast<double>(rest % half_dims[j]);
        rest /= half_dims[j];
        k2 += std::pow(2.0 * std::numbers::pi / periods[j] * i, 2);
      }
      const double k = std::sqrt(k2);
      symbol[f] = k == 0.0 ? g0 : std::pow(k, -beta_) * transform(k * radius_);
    }
    std::vector<double> real_space(total);
    fft::redft00(half_dims, symbol, real_space);
    double period_volume = 1.0;
    for (double p : periods) period_volume *= p;

    for_each_offset([&](std::size_t f, const std::array<std::ptrdiff_t, 3>& off) {
      std::size_t flat = 0;
      for (std::size_t j = 0; j < grid_.rank(); ++j)
        flat = flat * half_dims[j] + static_cast<std::size_t>(std::abs(off[j]));
      kernel_[f] = real_space[flat] / period_volume;
    });
  }

  Grid grid_;
  double beta_;
  KernelRule rule_;
  double radius_ = 0.0;
  std::vector<std::size_t> padded_;
  std::vector<double> kernel_;
  std::vector<double> kernel_hat_;
};

/// Free-space convolution (V * f)(x) = int |x - y|^{beta-N} f(y) dy of a nonnegative density.
///
/// Tiny negative outputs (roundoff, magnitude <= 1e-12 max) are clipped to zero.
inline RealField riesz_convolve(const RealField& f, const RieszKernelPlan& plan) {
  if (!(f.grid() == plan.grid())) throw GridMismatch("density and kernel plan");
  const Grid& g = f.grid();
  double fmax = 0.0, fmin = 0.0;
  for (double v : f.values()) {
    fmax = std::max(fmax, v);
    fmin = std::min(fmin, v);
  }
  if (fmin < -1e-12 * fmax || (fmax == 0.0 && fmin < 0.0))
    throw DomainError("riesz_convolve needs a nonnegative density, min = " + std::to_string(fmin));

  const auto& pd = plan.padded_dims();
  std::size_t padded_total = 1;
  for (auto m : pd) padded_total *= m;
  std::vector<double> padded(padded_total, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    std::size_t flat = 0;
    for (std::size_t j = 0; j < g.rank(); ++j) flat = flat * pd[j] + idx[j];
    padded[flat] = f[i];
  }
  std::vector<Complex> hat(fft::half_spectrum_size(pd));
  fft::forward_real(pd, padded, hat);
  const auto& kh = plan.kernel_transform();
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= kh[i];
  fft::backward_real(pd, hat, padded);

  const double scale = g.cell_volume() / static_cast<double>(padded_total);
  RealField out(g);
  double omax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    std::size_t flat = 0;
    for (std::size_t j = 0; j < g.rank(); ++j) flat = flat * pd[j] + idx[j];
    out[i] = padded[flat] * scale;
    omax = std::max(omax, out[i]);
  }
  for (double& v : out.data())
    if (v < 0.0 && v >= -1e-12 * omax) v = 0.0;
  return out;
}

}  // namespace fnls
