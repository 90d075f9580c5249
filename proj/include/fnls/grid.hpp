#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fnls/errors.hpp"

namespace fnls {

using Complex = std::complex<double>;

/// Periodic box [-L_j/2, L_j/2) discretized with n_j points per axis.
///
/// Point i on axis j sits at x = -L_j/2 + i*h_j, so index n_j/2 is the origin.
/// Wavenumbers follow the FFT ordering with the Nyquist mode stored at index n_j/2
/// as the negative frequency -n_j/2 * 2*pi/L_j. Flat indices are row-major (last axis
/// fastest).
class Grid {
 public:
  Grid() = default;

  Grid(std::vector<std::size_t> dims, std::vector<double> lengths)
      : dims_(std::move(dims)), lengths_(std::move(lengths)) {
    if (dims_.empty() || dims_.size() > 3) throw DomainError("grid rank must be 1, 2 or 3");
    if (dims_.size() != lengths_.size()) throw DomainError("grid dims and lengths differ in rank");
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      if (dims_[j] < 8 || dims_[j] % 2 != 0)
        throw DomainError("grid axis " + std::to_string(j) + " needs an even point count >= 8");
      if (!(lengths_[j] > 0.0) || !std::isfinite(lengths_[j]))
        throw DomainError("grid axis " + std::to_string(j) + " needs a positive box length");
    }
  }

  /// Same point count and box length on every axis.
  static Grid cube(std::size_t rank, std::size_t n, double length) {
    return Grid(std::vector<std::size_t>(rank, n), std::vector<double>(rank, length));
  }

  std::size_t rank() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::size_t dim(std::size_t axis) const { return dims_[axis]; }
  double length(std::size_t axis) const { return lengths_[axis]; }
  double spacing(std::size_t axis) const { return lengths_[axis] / static_cast<double>(dims_[axis]); }

  std::size_t size() const {
    std::size_t total = 1;
    for (auto n : dims_) total *= n;
    return total;
  }

  double cell_volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < rank(); ++j) v *= spacing(j);
    return v;
  }

  double volume() const {
    double v = 1.0;
    for (double l : lengths_) v *= l;
    return v;
  }

  double min_spacing() const {
    double h = spacing(0);
    for (std::size_t j = 1; j < rank(); ++j) h = std::min(h, spacing(j));
    return h;
  }

  double coordinate(std::size_t axis, std::size_t i) const {
    return -0.5 * lengths_[axis] + static_cast<double>(i) * spacing(axis);
  }

  double wavenumber(std::size_t axis, std::size_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(dims_[axis]);
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m >= n / 2) m -= n;
    return 2.0 * std::numbers::pi / lengths_[axis] * static_cast<double>(m);
  }

  /// Largest |k_j| representable on any axis (the Nyquist wavenumber of the finest axis).
  double nyquist() const {
    double k = 0.0;
    for (std::size_t j = 0; j < rank(); ++j) k = std::max(k, std::numbers::pi / spacing(j));
    return k;
  }

  /// Splits a flat row-major index into per-axis indices.
  std::array<std::size_t, 3> unflatten(std::size_t flat) const {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (std::size_t j = rank(); j-- > 0;) {
      idx[j] = flat % dims_[j];
      flat /= dims_[j];
    }
    return idx;
  }

  std::size_t flatten(const std::array<std::size_t, 3>& idx) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < rank(); ++j) flat = flat * dims_[j] + idx[j];
    return flat;
  }

  /// |x|^2 of every grid point, flat order.
  std::vector<double> radius_squared() const {
    std::vector<double> out(size());
    for (std::size_t f = 0; f < out.size(); ++f) {
      const auto idx = unflatten(f);
      double r2 = 0.0;
      for (std::size_t j = 0; j < rank(); ++j) r2 += std::pow(coordinate(j, idx[j]), 2);
      out[f] = r2;
    }
    return out;
  }

  /// |k|^2 of every Fourier mode, flat order.
  std::vector<double> wavenumber_squared() const {
    std::vector<double> out(size());
    for (std::size_t f = 0; f < out.size(); ++f) {
      const auto idx = unflatten(f);
      double k2 = 0.0;
      for (std::size_t j = 0; j < rank(); ++j) k2 += std::pow(wavenumber(j, idx[j]), 2);
      out[f] = k2;
    }
    return out;
  }

  /// |k|^{2s} of every Fourier mode, flat order (zero mode maps to 0).
  std::vector<double> fractional_symbol(double s) const {
    auto out = wavenumber_squared();
    for (double& v : out) v = v > 0.0 ? std::pow(v, s) : 0.0;
    return out;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> lengths_;
};

/// A grid function: values sampled at every grid point, row-major.
template <typename T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), T{}) {}
  Field(Grid grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw GridMismatch("value count does not match grid size");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& data() { return values_; }
  const std::vector<T>& data() const { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  Field& operator+=(const Field& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }
  Field& operator-=(const Field& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
  }
  template <typename S>
  Field& operator*=(S scale) {
    for (auto& v : values_) v *= scale;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  template <typename S>
  friend Field operator*(S scale, Field a) {
    return a *= scale;
  }

  void require_same_grid(const Field& other) const {
    if (!(grid_ == other.grid_)) throw GridMismatch("fields live on different grids");
  }

  bool all_finite() const {
    for (const auto& v : values_) {
      if constexpr (std::is_same_v<T, Complex>) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      } else {
        if (!std::isfinite(v)) return false;
      }
    }
    return true;
  }

 private:
  Grid grid_;
  std::vector<T> values_;
};

using ComplexField = Field<Complex>;
using RealField = Field<double>;

inline RealField real_part(const ComplexField& u) {
  RealField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i].real();
  return out;
}

inline RealField modulus(const ComplexField& u) {
  RealField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::abs(u[i]);
  return out;
}

inline ComplexField to_complex(const RealField& u) {
  ComplexField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i];
  return out;
}

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch("operands live on different grids");
}

/// Samples f(x) at every grid point; f receives the coordinates as a span of length rank.
template <typename T, typename Fn>
Field<T> sample(const Grid& grid, Fn&& fn) {
  Field<T> out(grid);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto idx = grid.unflatten(f);
    for (std::size_t j = 0; j < grid.rank(); ++j) x[j] = grid.coordinate(j, idx[j]);
    out[f] = static_cast<T>(fn(std::span<const double>(x.data(), grid.rank())));
  }
  return out;
}

}  // namespace fnls
