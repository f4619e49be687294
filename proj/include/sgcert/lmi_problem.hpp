#pragma once

#include "sgcert/lti.hpp"

namespace sgcert {

/// KYP-type matrix inequality in the symmetric variable P (states x states):
///
///   F(P) = [A B; I 0]' [0 P; P 0] [A B; I 0] - rho
///        = [[A'P + PA, PB], [B'P, 0]] - rho   <=  -slack * I
///
/// and, when psd_constrained is set, additionally P >= 0.
struct LmiProblem {
  Matrix A;    // states x states
  Matrix B;    // states x ports
  Matrix rho;  // (states + ports) square, symmetric
  bool psd_constrained = false;
  double slack = 0.0;
  /// Magnitude of the data, used to scale tolerances.
  double scale = 1.0;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index ports() const { return B.cols(); }
  Eigen::Index dimension() const { return states() + ports(); }

  /// The affine part [[A'P + PA, PB], [B'P, 0]].
  Matrix affine(const Matrix& P) const;
  /// F(P) = affine(P) - rho.
  Matrix lhs(const Matrix& P) const;
  /// Throws InvalidArgument when block sizes disagree.
  void validate() const;
};

}  // namespace sgcert
