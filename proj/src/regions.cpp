#include "sgcert/regions.hpp"

#include "sgcert/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace sgcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// A parameterized piece of a region boundary, t in [t0, t1].
struct Curve {
  std::function<Complex(double)> at;
  double t0 = 0.0, t1 = 1.0;
  int samples = 2048;
};

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 80) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++k) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

/// Minimizes f along each curve: dense sampling, then golden section around the best samples.
double minimize_over_curves(const std::vector<Curve>& curves, const std::function<double(Complex)>& f) {
  double best = kInf;
  for (const auto& cv : curves) {
    const int n = cv.samples;
    const double h = (cv.t1 - cv.t0) / n;
    std::vector<double> vals(n + 1);
    for (int k = 0; k <= n; ++k) vals[k] = f(cv.at(cv.t0 + k * h));
    // Refine around every local minimum among samples.
    for (int k = 0; k <= n; ++k) {
      const bool left = k == 0 || vals[k] <= vals[k - 1];
      const bool right = k == n || vals[k] <= vals[k + 1];
      best = std::min(best, vals[k]);
      if (!(left && right)) continue;
      const double lo = cv.t0 + std::max(0, k - 1) * h;
      const double hi = cv.t0 + std::min(n, k + 1) * h;
      best = std::min(best, golden_min([&](double t) { return f(cv.at(t)); }, lo, hi));
    }
  }
  return best;
}

/// Boundary curves of a conic region (x in terms of a scale-adapted sinh grid).
std::vector<Curve> conic_boundary(const ConicTheta& th, double scale) {
  std::vector<Curve> out;
  const double t11 = th.t11, t22 = th.t22, t13 = th.t13, t33 = th.t33;
  if (t11 * t22 > 0.0) {
    // Ellipse, possibly empty or a point.
    const double x0 = -t13 / t11;
    const double kappa = t13 * t13 / t11 - t33;
    if (kappa / t11 <= 0.0) {
      if (kappa == 0.0) out.push_back({[x0](double) { return Complex(x0, 0.0); }, 0.0, 1.0, 1});
      return out;
    }
    const double a = std::sqrt(kappa / t11), b = std::sqrt(kappa / t22);
    out.push_back({[=](double t) { return Complex(x0 + a * std::cos(t), b * std::sin(t)); }, 0.0,
                   2.0 * std::numbers::pi, 4096});
    return out;
  }
  if (t22 == 0.0) {
    // t11 x^2 + 2 t13 x + t33 = 0: vertical lines.
    std::vector<double> roots;
    if (t11 == 0.0) {
      if (t13 != 0.0) roots.push_back(-t33 / (2.0 * t13));
    } else {
      const double disc = t13 * t13 - t11 * t33;
      if (disc >= 0.0) {
        roots.push_back((-t13 + std::sqrt(disc)) / t11);
        roots.push_back((-t13 - std::sqrt(disc)) / t11);
      }
    }
    for (double x : roots)
      out.push_back({[=](double u) { return Complex(x, scale * std::sinh(u)); }, -12.0, 12.0, 4096});
    return out;
  }
  // Hyperbola or parabola: y^2 = g(x) with g(x) = -(t11 x^2 + 2 t13 x + t33)/t22.
  const double xc = t11 != 0.0 ? -t13 / t11 : 0.0;
  auto g = [=](double x) { return -(t11 * x * x + 2.0 * t13 * x + t33) / t22; };
  for (double sgn : {1.0, -1.0}) {
    out.push_back({[=](double u) {
                     const double x = xc + scale * std::sinh(u);
                     return Complex(x, sgn * std::sqrt(std::max(0.0, g(x))));
                   },
                   -12.0, 12.0, 8192});
  }
  return out;
}

double region_scale(const RegionGeom& r) {
  return std::visit(overloaded{[](const Disk& d) { return std::abs(d.center) + d.radius; },
                               [](const ExteriorDisk& d) { return std::abs(d.center) + d.radius; },
                               [](const HalfPlane& h) { return std::abs(h.offset) + 1.0; },
                               [](const ConicAligned& c) {
                                 const auto& t = c.theta;
                                 const double big = std::max({std::abs(t.t11), std::abs(t.t22), 1e-300});
                                 return 1.0 + std::sqrt((std::abs(t.t13) * 2.0 + std::abs(t.t33)) / big);
                               },
                               [](const EmptyRegion&) { return 1.0; }, [](const FullRegion&) { return 1.0; }},
                    r);
}

std::vector<Curve> boundary(const RegionGeom& r, double scale) {
  return std::visit(
      overloaded{[](const Disk& d) {
                   return std::vector<Curve>{{[d](double t) { return d.center + std::polar(d.radius, t); }, 0.0,
                                              2.0 * std::numbers::pi, 2048}};
                 },
                 [](const ExteriorDisk& d) {
                   return std::vector<Curve>{{[d](double t) { return d.center + std::polar(d.radius, t); }, 0.0,
                                              2.0 * std::numbers::pi, 2048}};
                 },
                 [scale](const HalfPlane& h) {
                   return std::vector<Curve>{
                       {[h, scale](double u) { return Complex(h.offset, scale * std::sinh(u)); }, -12.0, 12.0, 4096}};
                 },
                 [scale](const ConicAligned& c) { return conic_boundary(c.theta, scale); },
                 [](const EmptyRegion&) { return std::vector<Curve>{}; },
                 [](const FullRegion&) { return std::vector<Curve>{}; }},
      r);
}

/// Some point of the region, used to detect containment of one region in another.
Complex representative(const RegionGeom& r, double scale) {
  return std::visit(overloaded{[](const Disk& d) { return Complex(d.center, 0.0); },
                               [](const ExteriorDisk& d) { return Complex(d.center + 2.0 * d.radius + 1.0, 0.0); },
                               [](const HalfPlane& h) { return Complex(h.offset + h.normal, 0.0); },
                               [scale](const ConicAligned& c) {
                                 auto curves = conic_boundary(c.theta, scale);
                                 if (curves.empty()) return Complex(kInf, 0.0);
                                 return curves.front().at(0.5 * (curves.front().t0 + curves.front().t1));
                               },
                               [](const EmptyRegion&) { return Complex(kInf, 0.0); },
                               [](const FullRegion&) { return Complex(0.0, 0.0); }},
                    r);
}

double distance_via_boundaries(const RegionGeom& r1, const RegionGeom& r2) {
  const double scale = std::max(region_scale(r1), region_scale(r2));
  for (const auto& [a, b] : {std::pair{&r1, &r2}, std::pair{&r2, &r1}}) {
    const Complex p = representative(*a, scale);
    if (std::isfinite(p.real()) && contains(*b, p)) return 0.0;
  }
  const auto c1 = boundary(r1, scale);
  const auto c2 = boundary(r2, scale);
  const double d1 = minimize_over_curves(c1, [&](Complex z) { return point_distance(r2, z); });
  const double d2 = minimize_over_curves(c2, [&](Complex z) { return point_distance(r1, z); });
  return std::max(0.0, std::min(d1, d2));
}

}  // namespace

MultiplierPi pi_interior(double c, double r) {
  if (!(r > 0.0)) throw InvalidArgument("disk radius must be positive");
  return {-1.0, c, r * r - c * c};
}

MultiplierPi pi_exterior(double c, double r) {
  if (!(r > 0.0)) throw InvalidArgument("disk radius must be positive");
  return {1.0, -c, c * c - r * r};
}

bool is_positive_negative(const MultiplierPi& pi, double eps) { return pi.a <= -eps && pi.c >= eps; }

JSpectralFactor j_spectral_factor(const MultiplierPi& pi) {
  if (!is_positive_negative(pi)) throw InvalidArgument("multiplier is not positive-negative");
  const double sc = std::sqrt(pi.c);
  JSpectralFactor f;
  f.psi << pi.b / sc, sc, std::sqrt(pi.b * pi.b / pi.c - pi.a), 0.0;
  const double err = (f.reconstruct() - pi.matrix()).norm();
  if (!(err <= 1e-10 * (1.0 + pi.matrix().norm())))
    throw Error("J-spectral factor reconstruction error " + std::to_string(err));
  return f;
}

Eigen::Matrix3d ConicTheta::matrix() const {
  Eigen::Matrix3d m;
  m << t11, 0.0, t13, 0.0, t22, 0.0, t13, 0.0, t33;
  return m;
}

bool ConicTheta::indefinite() const {
  const Eigen::Matrix3d m = matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
  const double tol = 1e-10 * std::max(1.0, m.norm());
  return es.eigenvalues()(0) < -tol && es.eigenvalues()(2) > tol;
}

ConicTheta conic_from_ellipse(double x0, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("ellipse semi-axes must be positive");
  const double ia = 1.0 / (a * a);
  return {ia, 1.0 / (b * b), -x0 * ia, x0 * x0 * ia - 1.0};
}

ConicTheta conic_from_disk(double c, double r) {
  if (!(r > 0.0)) throw InvalidArgument("disk radius must be positive");
  return {1.0, 1.0, -c, c * c - r * r};
}

std::string region_kind(const RegionGeom& r) {
  static const char* names[] = {"disk", "ext_disk", "half_plane", "conic", "empty", "full"};
  return names[r.index()];
}

std::string describe(const RegionGeom& r) {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{[&](const Disk& d) { os << "Disk(" << d.center << ", " << d.radius << ")"; },
                        [&](const ExteriorDisk& d) { os << "ExteriorDisk(" << d.center << ", " << d.radius << ")"; },
                        [&](const HalfPlane& h) { os << "HalfPlane(" << (h.normal > 0 ? "Re z >= " : "Re z <= ") << h.offset << ")"; },
                        [&](const ConicAligned& c) {
                          os << "Conic(" << c.theta.t11 << ", " << c.theta.t22 << ", " << c.theta.t13 << ", "
                             << c.theta.t33 << ")";
                        },
                        [&](const EmptyRegion&) { os << "Empty"; }, [&](const FullRegion&) { os << "Full"; }},
             r);
  return os.str();
}

RegionGeom region_of_multiplier(const MultiplierPi& pi) {
  const double a = pi.a, b = pi.b, c = pi.c;
  if (a != 0.0) {
    const double disc = b * b - a * c;
    const double center = -b / a;
    if (a < 0.0) {
      if (disc > 0.0) return Disk{center, std::sqrt(disc) / std::abs(a)};
      return EmptyRegion{};
    }
    if (disc > 0.0) return ExteriorDisk{center, std::sqrt(disc) / a};
    return FullRegion{};
  }
  if (b != 0.0) return HalfPlane{b > 0.0 ? 1.0 : -1.0, -c / (2.0 * b)};
  if (c >= 0.0) return FullRegion{};
  return EmptyRegion{};
}

MultiplierPi multiplier_of_region(const RegionGeom& r) {
  return std::visit(overloaded{[](const Disk& d) { return pi_interior(d.center, d.radius); },
                               [](const ExteriorDisk& d) { return pi_exterior(d.center, d.radius); },
                               [](const HalfPlane& h) { return MultiplierPi{0.0, h.normal, -2.0 * h.normal * h.offset}; },
                               [](const ConicAligned&) -> MultiplierPi {
                                 throw InvalidArgument("conic regions have no 2x2 multiplier");
                               },
                               [](const EmptyRegion&) { return MultiplierPi{0.0, 0.0, -1.0}; },
                               [](const FullRegion&) { return MultiplierPi{0.0, 0.0, 1.0}; }},
                    r);
}

RegionGeom invert_region(const RegionGeom& r) {
  if (std::holds_alternative<ConicAligned>(r)) throw InvalidArgument("inversion of conic regions is not supported");
  const auto pi = multiplier_of_region(r);
  return region_of_multiplier({pi.c, pi.b, pi.a});
}

RegionGeom negate_region(const RegionGeom& r) {
  if (const auto* c = std::get_if<ConicAligned>(&r)) {
    auto t = c->theta;
    t.t13 = -t.t13;
    return ConicAligned{t};
  }
  const auto pi = multiplier_of_region(r);
  return region_of_multiplier({pi.a, -pi.b, pi.c});
}

RegionGeom scale_region(const RegionGeom& r, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("scale factor must be positive");
  if (const auto* c = std::get_if<ConicAligned>(&r)) {
    auto t = c->theta;
    t.t13 *= tau;
    t.t33 *= tau * tau;
    return ConicAligned{t};
  }
  const auto pi = multiplier_of_region(r);
  return region_of_multiplier({pi.a, pi.b * tau, pi.c * tau * tau});
}

double membership(const RegionGeom& r, Complex z) {
  return std::visit(overloaded{[z](const Disk& d) { return d.radius * d.radius - std::norm(z - d.center); },
                               [z](const ExteriorDisk& d) { return std::norm(z - d.center) - d.radius * d.radius; },
                               [z](const HalfPlane& h) { return h.normal * (z.real() - h.offset); },
                               [z](const ConicAligned& c) { return -c.theta.form(z); },
                               [](const EmptyRegion&) { return -1.0; }, [](const FullRegion&) { return 1.0; }},
                    r);
}

bool contains(const RegionGeom& r, Complex z, double tol) { return membership(r, z) >= -tol; }

double point_distance(const RegionGeom& r, Complex z) {
  return std::visit(overloaded{[z](const Disk& d) { return std::max(0.0, std::abs(z - d.center) - d.radius); },
                               [z](const ExteriorDisk& d) { return std::max(0.0, d.radius - std::abs(z - d.center)); },
                               [z](const HalfPlane& h) { return std::max(0.0, -h.normal * (z.real() - h.offset)); },
                               [z](const ConicAligned& c) {
                                 if (c.theta.form(z) <= 0.0) return 0.0;
                                 const RegionGeom self = c;
                                 const double scale = std::max(region_scale(self), std::abs(z) + 1.0);
                                 auto curves = conic_boundary(c.theta, scale);
                                 return minimize_over_curves(curves, [z](Complex w) { return std::abs(w - z); });
                               },
                               [](const EmptyRegion&) { return kInf; }, [](const FullRegion&) { return 0.0; }},
                    r);
}

double region_distance(const RegionGeom& r1, const RegionGeom& r2) {
  if (std::holds_alternative<EmptyRegion>(r1) || std::holds_alternative<EmptyRegion>(r2))
    throw InvalidArgument("distance to an empty region is undefined");
  if (std::holds_alternative<FullRegion>(r1) || std::holds_alternative<FullRegion>(r2)) return 0.0;

  if (const auto* d1 = std::get_if<Disk>(&r1)) {
    if (const auto* d2 = std::get_if<Disk>(&r2))
      return std::max(0.0, std::abs(d1->center - d2->center) - d1->radius - d2->radius);
    if (const auto* e = std::get_if<ExteriorDisk>(&r2))
      return std::max(0.0, e->radius - std::abs(e->center - d1->center) - d1->radius);
    if (const auto* h = std::get_if<HalfPlane>(&r2))
      return std::max(0.0, -h->normal * (d1->center - h->offset) - d1->radius);
  }
  if (std::holds_alternative<Disk>(r2) && !std::holds_alternative<ConicAligned>(r1)) return region_distance(r2, r1);
  if (std::holds_alternative<ExteriorDisk>(r1) &&
      (std::holds_alternative<ExteriorDisk>(r2) || std::holds_alternative<HalfPlane>(r2)))
    return 0.0;
  if (std::holds_alternative<HalfPlane>(r1) && std::holds_alternative<ExteriorDisk>(r2)) return 0.0;
  if (const auto* h1 = std::get_if<HalfPlane>(&r1)) {
    if (const auto* h2 = std::get_if<HalfPlane>(&r2)) {
      if (h1->normal == h2->normal) return 0.0;
      const auto& right = h1->normal > 0 ? *h1 : *h2;  // Re z >= offset
      const auto& left = h1->normal > 0 ? *h2 : *h1;   // Re z <= offset
      return std::max(0.0, right.offset - left.offset);
    }
  }
  return distance_via_boundaries(r1, r2);
}

double region_area(const RegionGeom& r) {
  return std::visit(overloaded{[](const Disk& d) { return std::numbers::pi * d.radius * d.radius; },
                               [](const ExteriorDisk&) { return kInf; }, [](const HalfPlane&) { return kInf; },
                               [](const ConicAligned& c) {
                                 const auto& t = c.theta;
                                 if (t.t11 > 0.0 && t.t22 > 0.0) {
                                   const double kappa = t.t13 * t.t13 / t.t11 - t.t33;
                                   return kappa > 0.0 ? std::numbers::pi * kappa / std::sqrt(t.t11 * t.t22) : 0.0;
                                 }
                                 if (t.t11 == 0.0 && t.t22 == 0.0 && t.t13 == 0.0) return t.t33 <= 0.0 ? kInf : 0.0;
                                 return kInf;
                               },
                               [](const EmptyRegion&) { return 0.0; }, [](const FullRegion&) { return kInf; }},
                    r);
}

Eigen::Vector2d bk_map(Complex z) {
  if (!(z.imag() > 0.0)) throw InvalidArgument("Beltrami-Klein map needs Im z > 0");
  const double r2 = std::norm(z);
  return {(r2 - 1.0) / (1.0 + r2), -2.0 * z.real() / (1.0 + r2)};
}

Complex bk_inverse(double eta, double phi) {
  const double rest = 1.0 - eta * eta - phi * phi;
  if (!(rest > 0.0)) throw InvalidArgument("Beltrami-Klein inverse needs a point inside the unit disk");
  return {-phi / (1.0 - eta), std::sqrt(rest) / (1.0 - eta)};
}

Complex bk_inverse(const Eigen::Vector2d& w) { return bk_inverse(w(0), w(1)); }

BkQuadratic bk_quadratic(const ConicTheta& t) {
  BkQuadratic q;
  q.M << t.t33 - t.t22, t.t13, t.t13, t.t11 - t.t22;
  q.b << -t.t33, -t.t13;
  q.c = t.t22 + t.t33;
  return q;
}

double curvature_numerator(const ConicTheta& theta) {
  if (!theta.indefinite()) throw InvalidArgument("conic multiplier must be indefinite");
  if (theta.t22 == 0.0) throw InvalidArgument("curvature numerator needs t22 != 0");
  return 8.0 * theta.t22 * theta.t22 * theta.alpha();
}

double curvature_numerator(const BkQuadratic& q) {
  Eigen::Matrix2d adj;
  adj << q.M(1, 1), -q.M(0, 1), -q.M(1, 0), q.M(0, 0);
  return 8.0 * (q.b.dot(adj * q.b) - q.c * q.M.determinant());
}

bool is_h_convex(const ConicTheta& theta) {
  if (!theta.indefinite()) throw InvalidArgument("conic multiplier must be indefinite (region empty or all of C)");
  return theta.t11 >= theta.t22;
}

}  // namespace sgcert
