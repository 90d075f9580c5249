#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "fnls/errors.hpp"

namespace fnls::fft {

// FFTW planning is not thread-safe, execution through the new-array interface is.
// Plans are created once per (kind, shape) under a lock and then shared read-only.
// FFTW_UNALIGNED lets any std::vector buffer be passed at execution time.

enum class Kind { ComplexForward, ComplexBackward, RealToComplex, ComplexToReal, Redft00 };

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using PlanKey = std::tuple<Kind, std::vector<int>>;

inline std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

inline fftw_plan make_plan(Kind kind, const std::vector<int>& shape) {
  std::lock_guard lock(planner_mutex());
  auto& cache = plan_cache();
  PlanKey key{kind, shape};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int n : shape) total *= static_cast<std::size_t>(n);
  std::size_t half = total / static_cast<std::size_t>(shape.back()) * (static_cast<std::size_t>(shape.back()) / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int rank = static_cast<int>(shape.size());

  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::ComplexForward:
    case Kind::ComplexBackward: {
      std::vector<std::complex<double>> buf(total);
      auto* p = reinterpret_cast<fftw_complex*>(buf.data());
      plan = fftw_plan_dft(rank, shape.data(), p, p,
                           kind == Kind::ComplexForward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      break;
    }
    case Kind::RealToComplex: {
      std::vector<double> in(total);
      std::vector<std::complex<double>> out(half);
      plan = fftw_plan_dft_r2c(rank, shape.data(), in.data(), reinterpret_cast<fftw_complex*>(out.data()), flags);
      break;
    }
    case Kind::ComplexToReal: {
      std::vector<std::complex<double>> in(half);
      std::vector<double> out(total);
      plan = fftw_plan_dft_c2r(rank, shape.data(), reinterpret_cast<fftw_complex*>(in.data()), out.data(), flags);
      break;
    }
    case Kind::Redft00: {
      std::vector<double> in(total), out(total);
      std::vector<fftw_r2r_kind> kinds(shape.size(), FFTW_REDFT00);
      plan = fftw_plan_r2r(rank, shape.data(), in.data(), out.data(), kinds.data(), flags);
      break;
    }
  }
  if (plan == nullptr) throw Error("FFTW could not create a plan");
  cache.emplace(std::move(key), plan);
  return plan;
}

inline std::vector<int> to_shape(std::span<const std::size_t> dims) {
  return {dims.begin(), dims.end()};
}

}  // namespace detail

/// In-place unnormalized forward DFT, exponent sign -1.
inline void forward(std::span<const std::size_t> dims, std::span<std::complex<double>> data) {
  auto plan = detail::make_plan(Kind::ComplexForward, detail::to_shape(dims));
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

/// In-place inverse DFT including the 1/n normalization.
inline void inverse(std::span<const std::size_t> dims, std::span<std::complex<double>> data) {
  auto plan = detail::make_plan(Kind::ComplexBackward, detail::to_shape(dims));
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

/// Number of complex outputs of a real-to-complex transform of the given shape.
inline std::size_t half_spectrum_size(std::span<const std::size_t> dims) {
  std::size_t total = 1;
  for (std::size_t j = 0; j + 1 < dims.size(); ++j) total *= dims[j];
  return total * (dims.back() / 2 + 1);
}

/// Unnormalized real-to-complex forward transform. `in` is not modified.
inline void forward_real(std::span<const std::size_t> dims, std::span<const double> in,
                         std::span<std::complex<double>> out) {
  auto plan = detail::make_plan(Kind::RealToComplex, detail::to_shape(dims));
  // r2c never writes its input when out-of-place.
  fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

/// Unnormalized complex-to-real backward transform. Destroys `in`.
inline void backward_real(std::span<const std::size_t> dims, std::span<std::complex<double>> in,
                          std::span<double> out) {
  auto plan = detail::make_plan(Kind::ComplexToReal, detail::to_shape(dims));
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

/// Multi-dimensional DCT-I (FFTW_REDFT00), unnormalized, out-of-place.
inline void redft00(std::span<const std::size_t> dims, std::span<const double> in, std::span<double> out) {
  auto plan = detail::make_plan(Kind::Redft00, detail::to_shape(dims));
  fftw_execute_r2r(plan, const_cast<double*>(in.data()), out.data());
}

}  // namespace fnls::fft
