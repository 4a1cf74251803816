#pragma once

#include <stdexcept>
#include <string>

namespace ptkr {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter or configuration values outside their admissible domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Non-finite input to a function defined only on finite reals.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid, lattice or matrix dimensions that do not fit together.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A state whose stored norm is zero, so normalized moments are undefined.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// The eigensolver did not converge. `index()` is the first unconverged level.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long index) : Error(what), index_(index) {}
  [[nodiscard]] long index() const noexcept { return index_; }

 private:
  long index_;
};

/// A computed result failed its a-posteriori check (residual, trace, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The wavefunction reached the edge of the momentum lattice.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The Gaussian-packet oracle left the range where the gain re-centers it.
class CaptureRangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptkr
