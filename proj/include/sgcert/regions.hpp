#pragma once

#include "sgcert/lti.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <variant>

namespace sgcert {

/// 2x2 symmetric multiplier [[a, b], [b, c]] describing the set
/// S(Pi) = { z : a|z|^2 + 2b Re z + c >= 0 }.
struct MultiplierPi {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  Eigen::Matrix2d matrix() const { return (Eigen::Matrix2d() << a, b, b, c).finished(); }
  /// [z; 1]^* Pi [z; 1]
  double form(Complex z) const { return a * std::norm(z) + 2.0 * b * z.real() + c; }
};

/// Pi_int(c, r) = (-1, c, r^2 - c^2), the disk |z - c| <= r. Throws InvalidArgument for r <= 0.
MultiplierPi pi_interior(double c, double r);
/// Pi_ext(c, r) = (1, -c, c^2 - r^2), the exterior |z - c| >= r.
MultiplierPi pi_exterior(double c, double r);

constexpr double kPositiveNegativeEps = 1e-9;

/// a <= -eps and c >= eps.
bool is_positive_negative(const MultiplierPi& pi, double eps = kPositiveNegativeEps);

struct JSpectralFactor {
  Eigen::Matrix2d psi;
  /// diag(1, -1)
  static Eigen::Matrix2d j_sig() { return Eigen::Vector2d(1.0, -1.0).asDiagonal(); }
  Eigen::Matrix2d reconstruct() const { return psi.transpose() * j_sig() * psi; }
};

/// Psi = [[b/sqrt(c), sqrt(c)], [sqrt(b^2/c - a), 0]] with Psi' J Psi = Pi.
/// Throws InvalidArgument unless pi is positive-negative.
JSpectralFactor j_spectral_factor(const MultiplierPi& pi);

/// Aligned 3x3 multiplier: the conic  t11 x^2 + t22 y^2 + 2 t13 x + t33 <= 0  for z = x + jy.
struct ConicTheta {
  double t11 = 0.0;
  double t22 = 0.0;
  double t13 = 0.0;
  double t33 = 0.0;

  double alpha() const { return t11 - t22; }
  Eigen::Matrix3d matrix() const;
  /// Eigenvalues of matrix() of both signs, beyond 1e-10 relative to its norm.
  bool indefinite() const;
  /// Raw form value; <= 0 inside.
  double form(Complex z) const {
    const double x = z.real(), y = z.imag();
    return t11 * x * x + t22 * y * y + 2.0 * t13 * x + t33;
  }
};

/// Ellipse (x - x0)^2/a^2 + y^2/b^2 <= 1 as an aligned conic.
ConicTheta conic_from_ellipse(double x0, double a, double b);
/// Disk |z - c| <= r as an aligned conic (t11 = t22 = 1).
ConicTheta conic_from_disk(double c, double r);

struct Disk {
  double center = 0.0;
  double radius = 1.0;
};
struct ExteriorDisk {
  double center = 0.0;
  double radius = 1.0;
};
/// normal * (Re z - offset) >= 0, normal in {+1, -1}.
struct HalfPlane {
  double normal = 1.0;
  double offset = 0.0;
};
struct ConicAligned {
  ConicTheta theta;
};
struct EmptyRegion {};
struct FullRegion {};

using RegionGeom = std::variant<Disk, ExteriorDisk, HalfPlane, ConicAligned, EmptyRegion, FullRegion>;

std::string region_kind(const RegionGeom& r);
std::string describe(const RegionGeom& r);

/// Classifies S(Pi) per the sign of a and the discriminant b^2 - ac.
RegionGeom region_of_multiplier(const MultiplierPi& pi);
/// Inverse of region_of_multiplier for the circular variants, normalized so |a| = 1
/// (or |b| = 1 for half-planes). Throws InvalidArgument for conics.
MultiplierPi multiplier_of_region(const RegionGeom& r);

/// z in result <=> 1/z in r (z != 0). Swaps (a, c) in the multiplier.
/// Throws InvalidArgument for conic regions.
RegionGeom invert_region(const RegionGeom& r);
/// z in result <=> -z in r.
RegionGeom negate_region(const RegionGeom& r);
/// z in result <=> z/tau in r. Throws InvalidArgument for tau <= 0.
RegionGeom scale_region(const RegionGeom& r, double tau);

/// Signed membership margin, normalized so that margin >= 0 means inside:
///   Disk:          r^2 - |z - c|^2
///   ExteriorDisk:  |z - c|^2 - r^2
///   HalfPlane:     normal * (Re z - offset)
///   ConicAligned:  -(t11 x^2 + t22 y^2 + 2 t13 x + t33)   (see ConicTheta::form for the raw sign)
///   Empty: -1, Full: +1
double membership(const RegionGeom& r, Complex z);
bool contains(const RegionGeom& r, Complex z, double tol = 0.0);

/// Euclidean distance from z to the region (0 when inside).
double point_distance(const RegionGeom& r, Complex z);

/// inf |z1 - z2| over z1 in r1, z2 in r2. Closed forms for the circular
/// variants; pairs involving a conic use boundary sampling with golden-section
/// refinement (accuracy about 1e-6). Throws InvalidArgument for Empty input.
double region_distance(const RegionGeom& r1, const RegionGeom& r2);

/// Area, +inf for unbounded regions, 0 for Empty.
double region_area(const RegionGeom& r);

/// Beltrami-Klein chart of the upper half-plane: (eta, phi) with
/// eta = (x^2 + y^2 - 1)/(1 + x^2 + y^2), phi = -2x/(1 + x^2 + y^2).
/// Throws InvalidArgument when Im z <= 0.
Eigen::Vector2d bk_map(Complex z);
/// x = -phi/(1 - eta), y = sqrt(1 - eta^2 - phi^2)/(1 - eta). Throws unless eta^2 + phi^2 < 1.
Complex bk_inverse(double eta, double phi);
Complex bk_inverse(const Eigen::Vector2d& w);

/// The conic pulled into Beltrami-Klein coordinates: q(w) = w'Mw + 2b'w + c,
/// with q(bk_map(z)) = (1 - eta)^2 * form(z).
struct BkQuadratic {
  Eigen::Matrix2d M;
  Eigen::Vector2d b;
  double c = 0.0;
  double evaluate(const Eigen::Vector2d& w) const { return w.dot(M * w) + 2.0 * b.dot(w) + c; }
};

BkQuadratic bk_quadratic(const ConicTheta& theta);

/// 8 t22^2 alpha. Throws InvalidArgument when theta is not indefinite or t22 == 0.
double curvature_numerator(const ConicTheta& theta);
/// 8 (b' adj(M) b - c det M), computed from the Beltrami-Klein quadratic.
double curvature_numerator(const BkQuadratic& q);

/// t11 >= t22. Throws InvalidArgument when theta is not indefinite.
bool is_h_convex(const ConicTheta& theta);

}  // namespace sgcert
