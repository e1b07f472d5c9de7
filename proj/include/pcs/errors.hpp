#pragma once

#include <stdexcept>
#include <string>

namespace pcs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, invalid segmentation, out-of-range values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation (e.g. unembedding an equator point).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis (controllability, hyperbolicity) does not hold.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioning, non-convergence, or ambiguous tolerances.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcs
