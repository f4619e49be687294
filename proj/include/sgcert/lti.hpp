#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace sgcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// A frequency on the closed imaginary axis: a finite w >= 0 in rad/s, or
/// the point at infinity, where H(jw) = D.
struct Frequency {
  double omega = 0.0;
  bool infinite = false;

  static Frequency at(double w) { return {w, false}; }
  static Frequency infinity() { return {0.0, true}; }

  bool operator==(const Frequency&) const = default;
};

std::string to_string(const Frequency& f);

/// Continuous-time realization x' = Ax + Bu, y = Cx + Du with x(0) = 0.
/// Inputs and outputs share the same dimension, since scaled graphs compare
/// u and y in one signal space.
class StateSpace {
 public:
  StateSpace() = default;
  /// Throws InvalidArgument unless A is m x m, B is m x n, C is n x m, D is n x n.
  StateSpace(Matrix A, Matrix B, Matrix C, Matrix D);

  /// Memoryless system y = D u.
  static StateSpace static_gain(Matrix D);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Matrix& D() const { return D_; }

  Eigen::Index states() const { return A_.rows(); }
  Eigen::Index ports() const { return D_.rows(); }

 private:
  Matrix A_, B_, C_, D_;
};

/// Scalar rational function num(s)/den(s), coefficients in descending powers.
struct RationalEntry {
  std::vector<double> num;
  std::vector<double> den{1.0};

  Complex evaluate(Complex s) const;
  /// Degrees after stripping leading zero coefficients; the zero polynomial has degree -1.
  int num_degree() const;
  int den_degree() const;
};

/// Square matrix of rational entries, row-major.
class RationalMatrixTF {
 public:
  RationalMatrixTF() = default;
  RationalMatrixTF(Eigen::Index n, std::vector<RationalEntry> entries);

  Eigen::Index size() const { return n_; }
  const RationalEntry& entry(Eigen::Index i, Eigen::Index j) const { return entries_[i * n_ + j]; }
  const std::vector<RationalEntry>& entries() const { return entries_; }

  /// Direct evaluation of each entry at s.
  CMatrix evaluate(Complex s) const;

 private:
  Eigen::Index n_ = 0;
  std::vector<RationalEntry> entries_;
};

/// Per-entry controllable canonical form, stacked block-diagonally.
/// Throws InvalidArgument naming (i, j) for an improper entry or a zero denominator.
StateSpace realize(const RationalMatrixTF& tf);

/// H(jw) = C (jwI - A)^{-1} B + D; returns D at infinity.
/// Throws SingularResolvent when jw is an eigenvalue of A.
CMatrix freq_response(const StateSpace& sys, const Frequency& f);
CMatrix freq_response(const StateSpace& sys, double omega);

/// (M + M^*) / 2. Throws InvalidArgument for non-square input.
CMatrix hermitian_part(const CMatrix& M);

struct HurwitzCheck {
  bool stable = true;
  /// max Re(eig A); -inf for a memoryless system.
  double abscissa = 0.0;
};

HurwitzCheck is_hurwitz(const StateSpace& sys);

/// Throws UnstableSystem with `what` in the message unless sys is Hurwitz.
void require_hurwitz(const StateSpace& sys, const std::string& what);

/// Extreme pole magnitudes, used to size frequency grids and time steps.
struct PoleRange {
  double slowest = 0.0;  // smallest |lambda| over nonzero poles
  double fastest = 0.0;  // largest |lambda|
  bool any = false;
};
PoleRange pole_range(const StateSpace& sys);

/// Preset transfer matrices from the two-system circular containment example.
RationalMatrixTF preset_h1();
RationalMatrixTF preset_h2();
/// "h1" or "h2"; throws InvalidArgument otherwise.
RationalMatrixTF preset_tf(const std::string& name);
StateSpace preset_system(const std::string& name);

/// diag(1/(s + a_k)) with a_k = 0.1 .. 0.3 linearly spaced, m states and ports.
StateSpace first_order_bank(Eigen::Index m, double a_min = 0.1, double a_max = 0.3);

}  // namespace sgcert
