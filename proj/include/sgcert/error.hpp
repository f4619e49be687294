#pragma once

#include <stdexcept>
#include <string>

namespace sgcert {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, bad range...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The operation needs a Hurwitz state matrix and did not get one.
class UnstableSystem : public Error {
 public:
  using Error::Error;
};

/// jw*I - A is singular at the requested frequency.
class SingularResolvent : public Error {
 public:
  explicit SingularResolvent(double omega)
      : Error("resolvent (jwI - A) is singular at w = " + std::to_string(omega)),
        omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

}  // namespace sgcert
