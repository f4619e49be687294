// Reference computations used as independent checks in the unit and
// acceptance tests. Nothing here calls into the library's numerics.
#pragma once

#include "sgcert/lti.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using sgcert::CMatrix;
using sgcert::Complex;
using sgcert::Matrix;

// Horner evaluation, coefficients in descending powers.
inline Complex poly(const std::vector<double>& c, Complex s) {
  Complex v = 0.0;
  for (double x : c) v = v * s + x;
  return v;
}

// H(s) = C (sI - A)^{-1} B + D by a dense complex solve.
inline CMatrix resolvent_response(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, Complex s) {
  const auto m = A.rows();
  if (m == 0) return D.cast<Complex>();
  CMatrix R = s * CMatrix::Identity(m, m) - A.cast<Complex>();
  return C.cast<Complex>() * R.fullPivLu().solve(B.cast<Complex>()) + D.cast<Complex>();
}

// exp(M) by Taylor series after scaling by 2^-k, then squaring.
inline Matrix taylor_expm(const Matrix& M) {
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int k = 0;
  while (std::ldexp(norm, -k) > 0.125) ++k;
  const Matrix S = std::ldexp(1.0, -k) * M;
  Matrix term = Matrix::Identity(M.rows(), M.cols()), sum = term;
  for (int j = 1; j < 30; ++j) {
    term = term * S / static_cast<double>(j);
    sum += term;
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum;
}

// Random Hurwitz realization: A = K - (G G' + delta I) with K skew, so the
// symmetric part of A is negative definite.
inline void random_stable(std::mt19937_64& rng, int m, int n, Matrix& A, Matrix& B, Matrix& C, Matrix& D,
                          double delta = 0.2) {
  std::normal_distribution<double> N(0.0, 1.0);
  auto rnd = [&](int r, int c) {
    Matrix X(r, c);
    for (int i = 0; i < X.size(); ++i) X.data()[i] = N(rng);
    return X;
  };
  const Matrix G = rnd(m, m) / std::sqrt(static_cast<double>(m));
  const Matrix K0 = rnd(m, m);
  A = 0.5 * (K0 - K0.transpose()) - (G * G.transpose() + delta * Matrix::Identity(m, m));
  B = rnd(m, n);
  C = rnd(n, m) / std::sqrt(static_cast<double>(m));
  D = 0.3 * rnd(n, n);
}

// max over a dense log grid (plus 0 and infinity) of the largest singular value of H(jw) - cI.
inline double sampled_radius(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, double c,
                             int points = 4000, double w_lo = 1e-4, double w_hi = 1e5) {
  double r = 0.0;
  auto upd = [&](const CMatrix& H) {
    CMatrix E = H;
    E.diagonal().array() -= c;
    Eigen::JacobiSVD<CMatrix> svd(E);
    r = std::max(r, svd.singularValues()(0));
  };
  upd(resolvent_response(A, B, C, D, 0.0));
  upd(D.cast<Complex>());
  for (int k = 0; k < points; ++k) {
    const double w = w_lo * std::pow(w_hi / w_lo, k / static_cast<double>(points - 1));
    upd(resolvent_response(A, B, C, D, Complex(0.0, w)));
  }
  return r;
}

// Distance between two filled disks by dense sampling of the first boundary.
inline double sampled_disk_distance(Complex c1, double r1, Complex c2, double r2, int n = 20000) {
  if (std::abs(c1 - c2) <= r1) return 0.0;
  double best = 1e300;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    const Complex p = c1 + r1 * std::polar(1.0, t);
    best = std::min(best, std::max(0.0, std::abs(p - c2) - r2));
  }
  return best;
}

}  // namespace oracle

namespace oracle {

inline Eigen::Vector2d bk(Complex z) {
  const double n = std::norm(z);
  return {(n - 1.0) / (1.0 + n), -2.0 * z.real() / (1.0 + n)};
}

inline Complex bk_inv(const Eigen::Vector2d& w) {
  const double e = w(0), p = w(1);
  return {-p / (1.0 - e), std::sqrt(std::max(0.0, 1.0 - e * e - p * p)) / (1.0 - e)};
}

inline double conic_form(double t11, double t22, double t13, double t33, Complex z) {
  const double x = z.real(), y = z.imag();
  return t11 * x * x + t22 * y * y + 2.0 * t13 * x + t33;
}

inline bool indefinite3(double t11, double t22, double t13, double t33) {
  Eigen::Matrix3d T;
  T << t11, 0.0, t13, 0.0, t22, 0.0, t13, 0.0, t33;
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(T).eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev.minCoeff() < -tol && ev.maxCoeff() > tol;
}

enum class ChordVerdict { convex, violated, no_boundary };

// Geometric h-convexity test: sample the boundary of the conic region in the
// open upper half-plane, map it to the Beltrami-Klein disk, and look for a
// chord whose midpoint (mapped back) lies strictly outside the region.
inline ChordVerdict chord_test(double t11, double t22, double t13, double t33, int grid = 400, int keep = 40) {
  // Boundary: y^2 = -(t11 x^2 + 2 t13 x + t33) / t22.
  double R = 1.0;
  const double disc = t13 * t13 - t11 * t33;
  if (t11 != 0.0 && disc >= 0.0) {
    const double s = std::sqrt(disc);
    R = std::max({R, std::abs((-t13 + s) / t11), std::abs((-t13 - s) / t11)});
  } else if (t11 != 0.0) {
    R = std::max(R, std::abs(t13 / t11));
  }
  R *= 10.0;
  const double scale = std::abs(t11) + std::abs(t22) + std::abs(t13) + std::abs(t33);
  std::vector<Complex> pts;
  for (int k = 0; k <= grid; ++k) {
    const double x = -R + 2.0 * R * k / grid;
    const double y2 = -(t11 * x * x + 2.0 * t13 * x + t33) / t22;
    if (y2 > 1e-10 * scale * (1.0 + x * x)) pts.emplace_back(x, std::sqrt(y2));
  }
  if (pts.size() < 3) return ChordVerdict::no_boundary;
  std::vector<Eigen::Vector2d> w;
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / static_cast<std::size_t>(keep));
  for (std::size_t i = 0; i < pts.size(); i += stride) w.push_back(bk(pts[i]));
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const Complex z = bk_inv(0.5 * (w[i] + w[j]));
      const double f = conic_form(t11, t22, t13, t33, z);
      if (f > 1e-9 * scale * (1.0 + std::norm(z))) return ChordVerdict::violated;
    }
  return ChordVerdict::convex;
}

}  // namespace oracle
