#ifndef KAPDIRAC_ERRORS_HPP_
#define KAPDIRAC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace kapdirac {

/// Failure classes. Each maps onto one C API status code and one CLI exit code.
enum class ErrorKind {
  Config,        // malformed or incomplete configuration input
  Precondition,  // value outside the model's validity domain
  Convergence,   // series truncation or Krylov iteration did not converge
  Io,            // filesystem / serialization failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::Precondition, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorKind::Convergence, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace kapdirac

#endif  // KAPDIRAC_ERRORS_HPP_
