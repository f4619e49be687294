#include "sgcert/lti.hpp"

#include "sgcert/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sgcert {

namespace {

std::vector<double> strip_leading_zeros(const std::vector<double>& p) {
  auto first = std::find_if(p.begin(), p.end(), [](double v) { return v != 0.0; });
  return {first, p.end()};
}

std::string entry_name(Eigen::Index i, Eigen::Index j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

std::string to_string(const Frequency& f) {
  if (f.infinite) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << f.omega;
  return os.str();
}

StateSpace::StateSpace(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  const auto m = A_.rows();
  const auto n = D_.rows();
  if (A_.cols() != m) throw InvalidArgument("A must be square");
  if (D_.cols() != n) throw InvalidArgument("D must be square (inputs and outputs share a dimension)");
  if (B_.rows() != m || B_.cols() != n) throw InvalidArgument("B must be states x ports");
  if (C_.rows() != n || C_.cols() != m) throw InvalidArgument("C must be ports x states");
  if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !D_.allFinite())
    throw InvalidArgument("state-space matrices must be finite");
}

StateSpace StateSpace::static_gain(Matrix D) {
  const auto n = D.rows();
  return StateSpace(Matrix(0, 0), Matrix(0, n), Matrix(n, 0), std::move(D));
}

Complex RationalEntry::evaluate(Complex s) const {
  auto horner = [s](const std::vector<double>& p) {
    Complex acc = 0.0;
    for (double c : p) acc = acc * s + c;
    return acc;
  };
  return horner(num) / horner(den);
}

int RationalEntry::num_degree() const { return static_cast<int>(strip_leading_zeros(num).size()) - 1; }
int RationalEntry::den_degree() const { return static_cast<int>(strip_leading_zeros(den).size()) - 1; }

RationalMatrixTF::RationalMatrixTF(Eigen::Index n, std::vector<RationalEntry> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ < 0 || static_cast<Eigen::Index>(entries_.size()) != n_ * n_)
    throw InvalidArgument("transfer matrix needs n*n entries");
}

CMatrix RationalMatrixTF::evaluate(Complex s) const {
  CMatrix H(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = 0; j < n_; ++j) H(i, j) = entry(i, j).evaluate(s);
  return H;
}

StateSpace realize(const RationalMatrixTF& tf) {
  const auto n = tf.size();
  struct Block {
    Matrix A;
    Vector b;
    Eigen::RowVectorXd c;
    Eigen::Index row, col;
  };
  std::vector<Block> blocks;
  Matrix D = Matrix::Zero(n, n);
  Eigen::Index total = 0;

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& e = tf.entry(i, j);
      auto den = strip_leading_zeros(e.den);
      auto num = strip_leading_zeros(e.num);
      if (den.empty()) throw InvalidArgument("zero denominator in entry " + entry_name(i, j));
      if (num.size() > den.size())
        throw InvalidArgument("improper entry " + entry_name(i, j) + ": numerator degree exceeds denominator degree");
      if (num.empty()) continue;

      const double lead = den.front();
      for (double& v : den) v /= lead;
      for (double& v : num) v /= lead;
      const auto k = static_cast<Eigen::Index>(den.size()) - 1;

      // Pad the numerator to k+1 coefficients and peel off the feedthrough.
      std::vector<double> padded(den.size() - num.size(), 0.0);
      padded.insert(padded.end(), num.begin(), num.end());
      const double d = padded.front();
      D(i, j) = d;
      if (k == 0) continue;

      Block blk;
      blk.A = Matrix::Zero(k, k);
      for (Eigen::Index r = 0; r + 1 < k; ++r) blk.A(r, r + 1) = 1.0;
      // den = s^k + a_{k-1} s^{k-1} + ... + a_0; den[t] is the coefficient of s^{k-t}.
      for (Eigen::Index t = 0; t < k; ++t) blk.A(k - 1, t) = -den[k - t];
      blk.b = Vector::Zero(k);
      blk.b(k - 1) = 1.0;
      blk.c.resize(k);
      for (Eigen::Index t = 0; t < k; ++t) blk.c(t) = padded[k - t] - d * den[k - t];
      blk.row = i;
      blk.col = j;
      total += k;
      blocks.push_back(std::move(blk));
    }
  }

  Matrix A = Matrix::Zero(total, total);
  Matrix B = Matrix::Zero(total, n);
  Matrix C = Matrix::Zero(n, total);
  Eigen::Index off = 0;
  for (const auto& blk : blocks) {
    const auto k = blk.A.rows();
    A.block(off, off, k, k) = blk.A;
    B.block(off, blk.col, k, 1) = blk.b;
    C.block(blk.row, off, 1, k) = blk.c;
    off += k;
  }
  return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

CMatrix freq_response(const StateSpace& sys, const Frequency& f) {
  CMatrix H = sys.D().cast<Complex>();
  if (f.infinite || sys.states() == 0) return H;
  CMatrix R = -sys.A().cast<Complex>();
  R.diagonal().array() += Complex(0.0, f.omega);
  Eigen::PartialPivLU<CMatrix> lu(R);
  const double scale = std::max(1.0, sys.A().cwiseAbs().maxCoeff() + std::abs(f.omega));
  if (!(lu.rcond() > 1e-14) || lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-14 * scale)
    throw SingularResolvent(f.omega);
  CMatrix X = lu.solve(sys.B().cast<Complex>());
  H.noalias() += sys.C().cast<Complex>() * X;
  return H;
}

CMatrix freq_response(const StateSpace& sys, double omega) { return freq_response(sys, Frequency::at(omega)); }

CMatrix hermitian_part(const CMatrix& M) {
  if (M.rows() != M.cols()) throw InvalidArgument("hermitian_part needs a square matrix");
  return (M + M.adjoint()) * 0.5;
}

HurwitzCheck is_hurwitz(const StateSpace& sys) {
  if (sys.states() == 0) return {true, -std::numeric_limits<double>::infinity()};
  Eigen::EigenSolver<Matrix> es(sys.A(), false);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  return {abscissa < 0.0, abscissa};
}

void require_hurwitz(const StateSpace& sys, const std::string& what) {
  const auto h = is_hurwitz(sys);
  if (!h.stable)
    throw UnstableSystem(what + ": state matrix is not Hurwitz (spectral abscissa " +
                         std::to_string(h.abscissa) + ")");
}

PoleRange pole_range(const StateSpace& sys) {
  PoleRange pr;
  if (sys.states() == 0) return pr;
  Eigen::EigenSolver<Matrix> es(sys.A(), false);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double mag = std::abs(es.eigenvalues()(k));
    hi = std::max(hi, mag);
    if (mag > 0.0) lo = std::min(lo, mag);
  }
  if (hi > 0.0) {
    pr.any = true;
    pr.slowest = lo;
    pr.fastest = hi;
  }
  return pr;
}

RationalMatrixTF preset_h1() {
  // (s+5)^2 = s^2 + 10 s + 25, (s+2)^2 = s^2 + 4 s + 4
  return RationalMatrixTF(2, {{{1.0}, {1.0, 10.0, 25.0}},
                              {{3.0}, {1.0, 4.0, 4.0}},
                              {{2.0}, {1.0, 10.0}},
                              {{4.0}, {1.0, 10.0, 25.0}}});
}

RationalMatrixTF preset_h2() {
  return RationalMatrixTF(2, {{{1.0}, {1.0, 1.0}},
                              {{0.3}, {1.0, 2.0}},
                              {{-0.2}, {1.0, 3.0}},
                              {{1.0}, {1.0, 1.0}}});
}

RationalMatrixTF preset_tf(const std::string& name) {
  if (name == "h1") return preset_h1();
  if (name == "h2") return preset_h2();
  throw InvalidArgument("unknown preset '" + name + "' (expected h1 or h2)");
}

StateSpace preset_system(const std::string& name) { return realize(preset_tf(name)); }

StateSpace first_order_bank(Eigen::Index m, double a_min, double a_max) {
  if (m < 1) throw InvalidArgument("first_order_bank needs m >= 1");
  Matrix A = Matrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double t = m == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(m - 1);
    A(k, k) = -(a_min + t * (a_max - a_min));
  }
  return StateSpace(A, Matrix::Identity(m, m), Matrix::Identity(m, m), Matrix::Zero(m, m));
}

}  // namespace sgcert
