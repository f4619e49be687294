#include "sgcert/sdp.hpp"

#include "sgcert/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace sgcert::sdp {

namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

double frob_dot(const Matrix& X, const Matrix& Y) { return (X.array() * Y.array()).sum(); }

Matrix sym(const Matrix& X) { return 0.5 * (X + X.transpose()); }

double min_eigenvalue(const Matrix& X) {
  if (X.size() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// The KYP map after normalizing rho to unit max-entry.
struct KypMap {
  Matrix A, B, R;
  bool hard = false;
  Index m = 0, n = 0, N = 0;

  /// [[A'P + PA, PB], [B'P, 0]]
  Matrix affine(const Matrix& P) const {
    Matrix out = Matrix::Zero(N, N);
    Matrix PA = P * A;
    out.topLeftCorner(m, m) = PA + PA.transpose();
    out.topRightCorner(m, n) = P * B;
    out.bottomLeftCorner(n, m) = out.topRightCorner(m, n).transpose();
    return out;
  }

  /// Adjoint of affine: A X11 + X11 A' + B X21 + X12 B'.
  Matrix adjoint(const Matrix& X) const {
    Matrix t = A * X.topLeftCorner(m, m) + B * X.bottomLeftCorner(n, m);
    return t + t.transpose();
  }
};

/// Nesterov-Todd scaling of one semidefinite block: G' S G = G^{-1} X G^{-T} = diag(lambda).
struct NtScaling {
  Matrix G, Ginv, W;
  Vector lambda;

  bool compute(const Matrix& X, const Matrix& S) {
    Eigen::LLT<Matrix> ls(S);
    if (ls.info() != Eigen::Success) return false;
    Matrix L = ls.matrixL();
    Matrix Q = L.transpose() * X * L;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(Q));
    if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0.0)) return false;
    lambda = es.eigenvalues().cwiseSqrt();
    Vector root = lambda.cwiseSqrt();
    Matrix Ur = es.eigenvectors() * root.asDiagonal();
    G = L.transpose().triangularView<Eigen::Upper>().solve(Ur);
    Ginv = root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose() * L.transpose();
    W = G * G.transpose();
    return true;
  }

  Matrix to_scaled_primal(const Matrix& dX) const { return sym(Ginv * dX * Ginv.transpose()); }
  Matrix to_scaled_dual(const Matrix& dS) const { return sym(G.transpose() * dS * G); }
  Matrix from_scaled(const Matrix& Y) const { return sym(G * Y * G.transpose()); }

  /// Largest step with diag(lambda) + alpha * D >= 0 for scaled direction D.
  double max_step(const Matrix& D) const {
    Vector r = lambda.cwiseSqrt().cwiseInverse();
    double e = min_eigenvalue(sym(r.asDiagonal() * D * r.asDiagonal()));
    return e < 0.0 ? -1.0 / e : kInf;
  }

  /// Solves lambda o Y = Rc, i.e. (Lambda Y + Y Lambda)/2 = Rc.
  Matrix solve_lyapunov(const Matrix& Rc) const {
    Matrix Y(Rc.rows(), Rc.cols());
    for (Index j = 0; j < Rc.cols(); ++j)
      for (Index i = 0; i < Rc.rows(); ++i) Y(i, j) = 2.0 * Rc(i, j) / (lambda(i) + lambda(j));
    return Y;
  }
};

/// Schur complement operator of the P-block,
///   M(V) = a V d + d V a + b V b + b' V b' (+ W2 V W2),
/// with a = G0 W1 G0', b = G0 W1 K0', d = K0 W1 K0', G0 = [A B], K0 = [I 0].
class SchurPP {
 public:
  virtual ~SchurPP() = default;
  virtual bool factor(const Matrix& a, const Matrix& b, const Matrix& d, const Matrix* w2) = 0;
  virtual Matrix solve(const Matrix& rhs, double tol) = 0;
  virtual long cg_iterations() const { return 0; }
  virtual bool failed() const { return false; }
};

class DenseSchur final : public SchurPP {
 public:
  explicit DenseSchur(Index m) : m_(m) {
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i <= j; ++i) pairs_.push_back({i, j});
  }

  bool factor(const Matrix& a, const Matrix& b, const Matrix& d, const Matrix* w2) override {
    const auto p = static_cast<Index>(pairs_.size());
    Matrix M(p, p);
    auto F = [&](Index pp, Index q, Index r, Index t) {
      double v = a(pp, r) * d(t, q) + d(pp, r) * a(t, q) + b(pp, r) * b(t, q) + b(r, pp) * b(q, t);
      if (w2) v += (*w2)(pp, r) * (*w2)(t, q);
      return v;
    };
    const double h = std::sqrt(0.5);
    for (Index col = 0; col < p; ++col) {
      const auto [k, l] = pairs_[col];
      for (Index row = 0; row <= col; ++row) {
        const auto [i, j] = pairs_[row];
        double v = F(i, j, k, l);
        if (k != l) v += F(i, j, l, k);
        if (i != j) {
          v += F(j, i, k, l);
          if (k != l) v += F(j, i, l, k);
        }
        if (i != j) v *= h;
        if (k != l) v *= h;
        M(row, col) = v;
        M(col, row) = v;
      }
    }
    llt_.compute(M);
    if (llt_.info() != Eigen::Success) {
      M.diagonal().array() += 1e-14 * M.diagonal().cwiseAbs().maxCoeff();
      llt_.compute(M);
    }
    return llt_.info() == Eigen::Success;
  }

  Matrix solve(const Matrix& rhs, double) override {
    Vector v(pairs_.size());
    const double s2 = std::sqrt(2.0);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto [i, j] = pairs_[k];
      v(k) = i == j ? rhs(i, i) : s2 * rhs(i, j);
    }
    Vector x = llt_.solve(v);
    Matrix X(m_, m_);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto [i, j] = pairs_[k];
      const double val = i == j ? x(k) : x(k) / s2;
      X(i, j) = val;
      X(j, i) = val;
    }
    return X;
  }

 private:
  struct Pair {
    Index i, j;
  };
  Index m_;
  std::vector<Pair> pairs_;
  Eigen::LLT<Matrix> llt_;
};

/// Preconditioned conjugate gradients on symmetric matrices. The
/// preconditioner a V d + d V a is inverted exactly by simultaneous
/// diagonalization of the pencil (a, d).
class CgSchur final : public SchurPP {
 public:
  CgSchur(int max_iterations) : max_iterations_(max_iterations) {}

  bool factor(const Matrix& a, const Matrix& b, const Matrix& d, const Matrix* w2) override {
    a_ = a;
    b_ = b;
    d_ = d;
    hard_ = w2 != nullptr;
    if (hard_) w2_ = *w2;
    Eigen::LLT<Matrix> ld(d);
    if (ld.info() != Eigen::Success) return false;
    Matrix L = ld.matrixL();
    Matrix Linv_a = L.triangularView<Eigen::Lower>().solve(a);
    Matrix at = L.triangularView<Eigen::Lower>().solve(Linv_a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(at));
    if (es.info() != Eigen::Success) return false;
    lambda_ = es.eigenvalues().cwiseMax(1e-300);
    T_ = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    return true;
  }

  Matrix solve(const Matrix& rhs, double tol) override {
    const double rnorm0 = rhs.norm();
    Matrix x = Matrix::Zero(rhs.rows(), rhs.cols());
    if (rnorm0 == 0.0) return x;
    Matrix r = rhs;
    Matrix z = precondition(r);
    Matrix p = z;
    double rz = frob_dot(r, z);
    int it = 0;
    for (; it < max_iterations_; ++it) {
      Matrix q = apply(p);
      const double pq = frob_dot(p, q);
      if (!(pq > 0.0)) {
        failed_ = true;
        break;
      }
      const double alpha = rz / pq;
      x += alpha * p;
      r -= alpha * q;
      if (r.norm() <= tol * rnorm0) {
        ++it;
        break;
      }
      z = precondition(r);
      const double rz_new = frob_dot(r, z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    if (it >= max_iterations_ && r.norm() > std::sqrt(tol) * rnorm0) failed_ = true;
    iterations_ += it;
    return sym(x);
  }

  long cg_iterations() const override { return iterations_; }
  bool failed() const override { return failed_; }

 private:
  Matrix apply(const Matrix& V) const {
    Matrix out = (a_ * V) * d_;
    out.noalias() += (b_ * V) * b_;
    Matrix full = out + out.transpose();
    if (hard_) full.noalias() += (w2_ * V) * w2_;
    return full;
  }

  Matrix precondition(const Matrix& R) const {
    Matrix Y = T_.transpose() * R * T_;
    for (Index j = 0; j < Y.cols(); ++j)
      for (Index i = 0; i < Y.rows(); ++i) Y(i, j) /= lambda_(i) + lambda_(j);
    return sym(T_ * Y * T_.transpose());
  }

  int max_iterations_;
  Matrix a_, b_, d_, w2_, T_;
  Vector lambda_;
  bool hard_ = false;
  long iterations_ = 0;
  bool failed_ = false;
};

struct Direction {
  Matrix dP, dX1, dX2, dS1, dS2;
  double ds = 0.0;
};

}  // namespace

SolveReport InteriorPointBackend::solve(const LmiProblem& problem, const SolveSettings& settings) const {
  problem.validate();
  SolveReport rep;
  const Index m = problem.states();
  const Index n = problem.ports();
  const Index N = m + n;
  const bool hard = problem.psd_constrained;

  // Memoryless case: F = -rho, nothing to optimize.
  if (m == 0) {
    const double lam = min_eigenvalue(sym(problem.rho));
    rep.margin = lam;
    rep.upper_bound = lam;
    rep.P = Matrix(0, 0);
    rep.status = lam >= problem.slack ? Status::feasible : Status::infeasible;
    rep.newton = "none";
    rep.message = "memoryless system";
    return rep;
  }

  KypMap K;
  K.m = m;
  K.n = n;
  K.N = N;
  K.hard = hard;
  K.A = problem.A;
  K.B = problem.B;
  const double rscale = std::max(problem.rho.cwiseAbs().maxCoeff(), 1e-12);
  K.R = sym(problem.rho) / rscale;
  const double target = problem.slack / rscale;
  const double nu = static_cast<double>(N + (hard ? m : 0));

  std::string newton = newton_ != "auto" ? newton_ : settings.newton;
  const Index p_dim = m * (m + 1) / 2;
  if (newton == "auto") newton = p_dim <= settings.dense_limit ? "dense" : "cg";
  if (newton != "dense" && newton != "cg") throw InvalidArgument("unknown newton strategy '" + newton + "'");
  rep.newton = newton;

  // Dual iterate y = (P, s) with S = C - A(y) kept exactly feasible.
  Matrix P = Matrix::Zero(m, m);
  double s = std::min(min_eigenvalue(K.R), 0.0) - 1.0;
  auto slack_of = [&](const Matrix& PP, double ss, Matrix& S1, Matrix& S2) {
    S1 = K.R - K.affine(PP);
    S1.diagonal().array() -= ss;
    if (hard) {
      S2 = PP;
      S2.diagonal().array() -= ss;
    }
  };
  Matrix S1, S2;
  slack_of(P, s, S1, S2);
  Matrix X1 = Matrix::Identity(N, N) / nu;
  Matrix X2 = hard ? Matrix(Matrix::Identity(m, m) / nu) : Matrix();

  const Matrix G0 = (Matrix(m, N) << K.A, K.B).finished();
  rep.status = Status::unknown;
  rep.message = "iteration limit reached";
  double best_s = s;
  Matrix best_P = P;
  int stalls = 0;

  for (int it = 0; it <= settings.max_iterations; ++it) {
    rep.iterations = it;
    if (s > best_s) {
      best_s = s;
      best_P = P;
    }
    // Residuals and bounds.
    Matrix rpP = -(K.adjoint(X1) - (hard ? X2 : Matrix::Zero(m, m)));
    double rps = 1.0 - X1.trace() - (hard ? X2.trace() : 0.0);
    const double pobj = frob_dot(K.R, X1);
    const double rp_norm = (rpP.norm() + std::abs(rps)) / (1.0 + K.A.norm() + K.B.norm());
    const double gap = pobj - s;
    const double rel_gap = gap / (1.0 + std::abs(pobj) + std::abs(s));
    rep.upper_bound = pobj * rscale;

    if (settings.stop_at_target && s >= target) {
      rep.status = Status::feasible;
      rep.message = "target margin attained";
      break;
    }
    if (rp_norm <= 1e-8 && rel_gap <= settings.gap_tolerance) {
      rep.status = s >= target ? Status::feasible : Status::infeasible;
      rep.message = "converged";
      break;
    }
    if (settings.stop_at_target && rp_norm <= 1e-8 && pobj < target - 1e-9 * (1.0 + std::abs(pobj))) {
      rep.status = Status::infeasible;
      rep.message = "primal bound below target margin";
      break;
    }
    if (it == settings.max_iterations) break;

    NtScaling sc1, sc2;
    if (!sc1.compute(X1, S1) || (hard && !sc2.compute(X2, S2))) {
      rep.message = "lost positive definiteness";
      break;
    }
    const double mu = (frob_dot(X1, S1) + (hard ? frob_dot(X2, S2) : 0.0)) / nu;

    // Schur complement: P-block operator plus the bordering column for s.
    const Matrix& W1 = sc1.W;
    Matrix a = G0 * W1 * G0.transpose();
    Matrix b = G0 * W1.leftCols(m);
    Matrix d = W1.topLeftCorner(m, m);
    a = sym(a);
    d = sym(d);
    std::unique_ptr<SchurPP> schur;
    if (newton == "dense")
      schur = std::make_unique<DenseSchur>(m);
    else
      schur = std::make_unique<CgSchur>(settings.cg_max_iterations);
    if (!schur->factor(a, b, d, hard ? &sc2.W : nullptr)) {
      rep.message = "Schur complement factorization failed";
      break;
    }
    const Matrix W1sq = W1 * W1;
    Matrix Mps = K.adjoint(W1sq);
    double Mss = W1sq.trace();
    Matrix W2sq;
    if (hard) {
      W2sq = sc2.W * sc2.W;
      Mps -= W2sq;
      Mss += W2sq.trace();
    }
    Mps = sym(Mps);
    const double cg_tol = std::max(settings.cg_tolerance, std::min(1e-4, 1e-2 * mu));
    Matrix u = schur->solve(Mps, cg_tol);
    const double denom = Mss - frob_dot(Mps, u);

    auto direction = [&](const Matrix& Y1, const Matrix& Y2) {
      Direction dir;
      Matrix H1 = sc1.from_scaled(Y1);
      Matrix rhsP = rpP - K.adjoint(H1);
      double rhss = rps - H1.trace();
      Matrix H2;
      if (hard) {
        H2 = sc2.from_scaled(Y2);
        rhsP += H2;
        rhss -= H2.trace();
      }
      Matrix v = schur->solve(sym(rhsP), cg_tol);
      dir.ds = (rhss - frob_dot(Mps, v)) / denom;
      dir.dP = v - dir.ds * u;
      // dS = -A(dy), dX = H + W A(dy) W
      Matrix Ady1 = K.affine(dir.dP);
      Ady1.diagonal().array() += dir.ds;
      dir.dS1 = -Ady1;
      dir.dX1 = sym(H1 + W1 * Ady1 * W1);
      if (hard) {
        Matrix Ady2 = -dir.dP;
        Ady2.diagonal().array() += dir.ds;
        dir.dS2 = -Ady2;
        dir.dX2 = sym(H2 + sc2.W * Ady2 * sc2.W);
      }
      return dir;
    };

    auto steps = [&](const Direction& dir, Matrix& dX1t, Matrix& dS1t, Matrix& dX2t, Matrix& dS2t) {
      dX1t = sc1.to_scaled_primal(dir.dX1);
      dS1t = sc1.to_scaled_dual(dir.dS1);
      double ap = sc1.max_step(dX1t), ad = sc1.max_step(dS1t);
      if (hard) {
        dX2t = sc2.to_scaled_primal(dir.dX2);
        dS2t = sc2.to_scaled_dual(dir.dS2);
        ap = std::min(ap, sc2.max_step(dX2t));
        ad = std::min(ad, sc2.max_step(dS2t));
      }
      return std::pair{ap, ad};
    };

    // Predictor.
    Matrix L1 = sc1.lambda.asDiagonal();
    Matrix L2 = hard ? Matrix(sc2.lambda.asDiagonal()) : Matrix();
    Direction aff = direction(-L1, hard ? Matrix(-L2) : Matrix());
    Matrix dX1t, dS1t, dX2t, dS2t;
    auto [ap_aff, ad_aff] = steps(aff, dX1t, dS1t, dX2t, dS2t);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double mu_aff = frob_dot(X1 + ap_aff * aff.dX1, S1 + ad_aff * aff.dS1);
    if (hard) mu_aff += frob_dot(X2 + ap_aff * aff.dX2, S2 + ad_aff * aff.dS2);
    mu_aff /= nu;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Mehrotra corrector: Rc = sigma mu I - Lambda^2 - dXt o dSt.
    auto corrector_rhs = [&](const NtScaling& sc, const Matrix& dXt, const Matrix& dSt) {
      Matrix Rc = -sym(dXt * dSt);
      Rc.diagonal().array() += sigma * mu;
      Rc.diagonal() -= sc.lambda.cwiseAbs2();
      return sc.solve_lyapunov(Rc);
    };
    Matrix Y1 = corrector_rhs(sc1, dX1t, dS1t);
    Matrix Y2 = hard ? corrector_rhs(sc2, dX2t, dS2t) : Matrix();
    Direction dir = direction(Y1, Y2);
    if (schur->failed()) {
      rep.message = "conjugate gradients did not converge";
      break;
    }
    auto [ap_max, ad_max] = steps(dir, dX1t, dS1t, dX2t, dS2t);
    const double gamma = 0.95;
    const double ap = std::min(1.0, gamma * ap_max);
    const double ad = std::min(1.0, gamma * ad_max);

    X1 = sym(X1 + ap * dir.dX1);
    if (hard) X2 = sym(X2 + ap * dir.dX2);
    P = sym(P + ad * dir.dP);
    s += ad * dir.ds;
    slack_of(P, s, S1, S2);

    if (std::max(ap, ad) < 1e-10) {
      if (++stalls >= 3) {
        rep.message = "step length collapsed";
        break;
      }
    } else {
      stalls = 0;
    }
    // Loose convergence fallback once the barrier parameter is negligible.
    if (mu < 1e-13) {
      if (rp_norm <= 1e-6 && rel_gap <= 1e-6) {
        rep.status = s >= target ? Status::feasible : Status::infeasible;
        rep.message = "converged (loose tolerance)";
      } else {
        rep.message = "barrier parameter underflow";
      }
      rep.iterations = it + 1;
      break;
    }
    rep.cg_iterations += schur->cg_iterations();
  }

  if (s > best_s) {
    best_s = s;
    best_P = P;
  }
  // Any dual iterate is a valid certificate of its own margin.
  rep.P = best_P * rscale;
  rep.margin = best_s * rscale;
  return rep;
}

}  // namespace sgcert::sdp
