#ifndef QIOPA_ERRORS_HPP
#define QIOPA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qiopa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad state, bad mode pair, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The requested truncated basis would be too large to build.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The basis is too small to represent the requested state or operator.
class BasisError : public Error {
 public:
  using Error::Error;
};

/// Probability leaked through the truncation boundary beyond the allowed bound.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double loss, double bound)
      : Error(what), loss_(loss), bound_(bound) {}

  double loss() const noexcept { return loss_; }
  double bound() const noexcept { return bound_; }

 private:
  double loss_;
  double bound_;
};

}  // namespace qiopa

#endif  // QIOPA_ERRORS_HPP
