#pragma once

#include <stdexcept>
#include <string>

namespace fnls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative psi, s outside (0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a plan) live on different grids.
class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error("grid mismatch: " + what) {}
};

/// A resampled or evolved field is no longer resolved inside the box.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver or integrator failure (blow-up, NaN, ...).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text or snapshot file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fnls
