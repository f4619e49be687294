#include "oracles.hpp"
#include "sgcert/error.hpp"
#include "sgcert/regions.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace sgcert;

namespace {

template <class T>
T as(const RegionGeom& r) {
  REQUIRE(std::holds_alternative<T>(r));
  return std::get<T>(r);
}

}  // namespace

TEST_SUITE("regions") {
  TEST_CASE("region of multiplier") {
    const Disk unit = as<Disk>(region_of_multiplier({-1.0, 0.0, 1.0}));
    CHECK(unit.center == 0.0);
    CHECK(unit.radius == doctest::Approx(1.0));

    const MultiplierPi p = pi_interior(0.1, 0.78);
    CHECK(p.a == -1.0);
    CHECK(p.b == doctest::Approx(0.1));
    CHECK(p.c == doctest::Approx(0.5984));
    const Disk d = as<Disk>(region_of_multiplier(p));
    CHECK(d.center == doctest::Approx(0.1));
    CHECK(d.radius == doctest::Approx(0.78));

    const HalfPlane h = as<HalfPlane>(region_of_multiplier({0.0, 1.0, 0.0}));
    CHECK(h.normal > 0.0);
    CHECK(h.offset == doctest::Approx(0.0));
    CHECK(contains(HalfPlane{h}, Complex(1.0, 5.0)));
    CHECK_FALSE(contains(HalfPlane{h}, Complex(-1.0, 0.0)));

    CHECK(std::holds_alternative<EmptyRegion>(region_of_multiplier({-1.0, 0.0, -1.0})));
    CHECK(std::holds_alternative<FullRegion>(region_of_multiplier({1.0, 0.0, 1.0})));
    CHECK(std::holds_alternative<FullRegion>(region_of_multiplier({0.0, 0.0, 1.0})));
    CHECK(std::holds_alternative<EmptyRegion>(region_of_multiplier({0.0, 0.0, -1.0})));
  }

  TEST_CASE("interior and exterior multipliers") {
    const MultiplierPi u = pi_interior(0.0, 1.0);
    CHECK(u.a == -1.0);
    CHECK(u.b == 0.0);
    CHECK(u.c == 1.0);
    const MultiplierPi h2 = pi_interior(0.52, 0.75);
    CHECK(h2.c == doctest::Approx(0.2921));
    const MultiplierPi e = pi_exterior(0.0, 1.0);
    CHECK(e.a == 1.0);
    CHECK(e.c == -1.0);
    const RegionGeom er = region_of_multiplier(e);
    CHECK_FALSE(contains(er, 0.0));
    CHECK(contains(er, 2.0));
    CHECK_THROWS_AS(pi_interior(0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(pi_exterior(0.0, -1.0), InvalidArgument);
  }

  TEST_CASE("positive-negative property") {
    CHECK(is_positive_negative(pi_interior(0.1, 0.78)));
    CHECK_FALSE(is_positive_negative(pi_exterior(0.1, 0.78)));
    CHECK_FALSE(is_positive_negative(pi_interior(1.0, 0.5)));
    CHECK_FALSE(is_positive_negative({0.0, 1.0, 0.0}));
  }

  TEST_CASE("J-spectral factor") {
    const auto f = j_spectral_factor({-1.0, 0.0, 1.0});
    CHECK((f.psi - Eigen::Matrix2d{{0.0, 1.0}, {1.0, 0.0}}).norm() < 1e-15);
    const auto g = j_spectral_factor(pi_interior(0.1, 0.78));
    CHECK(g.psi(0, 0) == doctest::Approx(0.12928).epsilon(1e-4));
    CHECK(g.psi(0, 1) == doctest::Approx(0.77356).epsilon(1e-4));
    CHECK(g.psi(1, 0) == doctest::Approx(1.00832).epsilon(1e-4));
    CHECK(g.psi(1, 1) == 0.0);
    const auto k = j_spectral_factor({-4.0, 0.0, 1.0});
    CHECK((k.psi - Eigen::Matrix2d{{0.0, 1.0}, {2.0, 0.0}}).norm() < 1e-15);
    CHECK_THROWS_AS(j_spectral_factor(pi_exterior(0.0, 1.0)), InvalidArgument);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-3.0, 3.0), P(1e-3, 3.0);
    for (int t = 0; t < 1000; ++t) {
      const MultiplierPi pi{-P(rng), U(rng), P(rng)};
      const Eigen::Matrix2d J = Eigen::Vector2d(1.0, -1.0).asDiagonal();
      const auto fac = j_spectral_factor(pi);
      const Eigen::Matrix2d rec = fac.psi.transpose() * J * fac.psi;
      CHECK((rec - pi.matrix()).norm() <= 1e-10 * (1.0 + pi.matrix().norm()));
      CHECK(std::abs(fac.psi.determinant()) > 0.0);
    }
  }

  TEST_CASE("inversion, negation and scaling") {
    const ExteriorDisk e = as<ExteriorDisk>(invert_region(Disk{0.1, 0.78}));
    CHECK(e.center == doctest::Approx(-0.16711).epsilon(1e-4));
    CHECK(e.radius == doctest::Approx(1.30348).epsilon(1e-4));
    const Disk n = as<Disk>(negate_region(Disk{0.52, 0.75}));
    CHECK(n.center == doctest::Approx(-0.52));
    CHECK(n.radius == doctest::Approx(0.75));
    const Disk s = as<Disk>(scale_region(Disk{1.0, 1.0}, 0.5));
    CHECK(s.center == doctest::Approx(0.5));
    CHECK(s.radius == doctest::Approx(0.5));
    CHECK_THROWS_AS(scale_region(Disk{1.0, 1.0}, 0.0), InvalidArgument);
    const Disk off = as<Disk>(invert_region(Disk{2.0, 1.0}));
    CHECK(off.center == doctest::Approx(2.0 / 3.0));
    CHECK(off.radius == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("transforms agree with pointwise membership") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-2.0, 2.0), R(0.1, 2.0), T(0.05, 3.0);
    int agree = 0, total = 0;
    for (int t = 0; t < 200; ++t) {
      const double c = U(rng), r = R(rng), tau = T(rng);
      const RegionGeom base = t % 2 ? RegionGeom{Disk{c, r}} : RegionGeom{ExteriorDisk{c, r}};
      const RegionGeom inv = invert_region(base), neg = negate_region(base), sc = scale_region(base, tau);
      for (int k = 0; k < 50; ++k) {
        const Complex z(U(rng), U(rng));
        const double band = 1e-9;
        auto same = [&](const RegionGeom& g, Complex pre) {
          const double m1 = membership(base, pre), m2 = membership(g, z);
          if (std::abs(m1) < band || std::abs(m2) < band) return true;
          return (m1 >= 0) == (m2 >= 0);
        };
        total += 3;
        agree += same(inv, 1.0 / z) + same(neg, -z) + same(sc, z / tau);
      }
    }
    CHECK(agree == total);
  }

  TEST_CASE("inverted paper disk checked by random membership") {
    const RegionGeom d = Disk{0.1, 0.78};
    const RegionGeom inv = invert_region(d);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    int mismatches = 0;
    for (int k = 0; k < 10000; ++k) {
      const Complex z(U(rng), U(rng));
      if (std::abs(membership(d, 1.0 / z)) < 1e-9) continue;
      mismatches += contains(inv, z) != contains(d, 1.0 / z);
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("double inversion is the identity") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-2.0, 2.0), R(0.1, 2.0);
    for (int t = 0; t < 100; ++t) {
      const double c = U(rng), r = R(rng);
      if (std::abs(std::abs(c) - r) < 1e-3) continue;
      const RegionGeom back = invert_region(invert_region(Disk{c, r}));
      const Disk d = as<Disk>(back);
      CHECK(d.center == doctest::Approx(c).epsilon(1e-10));
      CHECK(d.radius == doctest::Approx(r).epsilon(1e-10));
    }
  }

  TEST_CASE("round trip of membership and the quadratic form") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    int bad = 0;
    for (int t = 0; t < 10000; ++t) {
      const MultiplierPi pi{U(rng), U(rng), U(rng)};
      const Complex z(2.0 * U(rng), 2.0 * U(rng));
      const double f = pi.form(z);
      if (std::abs(f) < 1e-9) continue;
      bad += contains(region_of_multiplier(pi), z) != (f >= 0.0);
    }
    CHECK(bad == 0);
  }

  TEST_CASE("region distance closed forms") {
    CHECK(region_distance(Disk{0.0, 1.0}, Disk{3.0, 1.0}) == doctest::Approx(1.0));
    CHECK(region_distance(Disk{0.0, 1.0}, Disk{1.0, 1.0}) == 0.0);
    CHECK(region_distance(ExteriorDisk{-0.16711, 1.30348}, Disk{-0.52, 0.75}) == doctest::Approx(0.2006).epsilon(1e-3));
    CHECK(region_distance(ExteriorDisk{0.0, 2.0}, Disk{0.0, 0.5}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(region_distance(EmptyRegion{}, Disk{0.0, 1.0}), InvalidArgument);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-3.0, 3.0), R(0.1, 1.5);
    for (int t = 0; t < 50; ++t) {
      const double c1 = U(rng), r1 = R(rng), c2 = U(rng), r2 = R(rng);
      const double d = region_distance(Disk{c1, r1}, Disk{c2, r2});
      CHECK(d == doctest::Approx(region_distance(Disk{c2, r2}, Disk{c1, r1})));
      CHECK(d >= 0.0);
      CHECK(std::abs(d - oracle::sampled_disk_distance(c1, r1, c2, r2)) < 1e-6);
    }
  }

  TEST_CASE("conic distance fallback against closed forms") {
    // A circle written as a conic must reproduce the disk distance.
    const RegionGeom a = ConicAligned{conic_from_disk(0.0, 1.0)};
    CHECK(region_distance(a, Disk{3.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(region_distance(a, Disk{0.5, 0.2}) == 0.0);
    const RegionGeom e = ConicAligned{conic_from_ellipse(0.0, 1.0, 2.0)};
    CHECK(region_distance(e, Disk{3.0, 0.5}) == doctest::Approx(1.5).epsilon(1e-6));
  }

  TEST_CASE("membership sign conventions") {
    CHECK(membership(Disk{0.0, 1.0}, 0.0) == doctest::Approx(1.0));
    const RegionGeom tall = ConicAligned{{2.0, 1.0, 0.0, -1.0}};
    CHECK(membership(tall, 0.5) == doctest::Approx(0.5));
    CHECK(ConicTheta{2.0, 1.0, 0.0, -1.0}.form(0.5) == doctest::Approx(-0.5));
    CHECK(ConicTheta{1.0, 1.0, 0.0, -1.0}.form(Complex(1.0, 1.0)) == doctest::Approx(1.0));
    CHECK_FALSE(contains(ConicAligned{{1.0, 1.0, 0.0, -1.0}}, Complex(1.0, 1.0)));
  }

  TEST_CASE("Beltrami-Klein map") {
    const auto w = bk_map(Complex(0.0, 1.0));
    CHECK(w.norm() < 1e-15);
    CHECK(std::abs(bk_inverse(0.0, 0.0) - Complex(0.0, 1.0)) < 1e-15);
    const auto v = bk_map(Complex(1.0, 1.0));
    CHECK(v(0) == doctest::Approx(1.0 / 3.0));
    CHECK(v(1) == doctest::Approx(-2.0 / 3.0));
    CHECK(std::abs(bk_inverse(v) - Complex(1.0, 1.0)) < 1e-12);
    CHECK_THROWS_AS(bk_map(Complex(1.0, 0.0)), InvalidArgument);
    CHECK_THROWS_AS(bk_inverse(1.0, 0.0), InvalidArgument);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> X(-5.0, 5.0), Y(1e-3, 5.0);
    for (int t = 0; t < 1000; ++t) {
      const Complex z(X(rng), Y(rng));
      CHECK(std::abs(bk_inverse(bk_map(z)) - z) < 1e-12 * (1.0 + std::abs(z)));
      CHECK((bk_map(z) - oracle::bk(z)).norm() < 1e-14);
    }
  }

  TEST_CASE("Beltrami-Klein quadratic") {
    auto q = bk_quadratic({1.0, 1.0, 0.0, -1.0});
    CHECK((q.M - Eigen::Matrix2d{{-2.0, 0.0}, {0.0, 0.0}}).norm() < 1e-15);
    CHECK((q.b - Eigen::Vector2d{1.0, 0.0}).norm() < 1e-15);
    CHECK(q.c == 0.0);
    q = bk_quadratic({2.0, 1.0, 0.0, -1.0});
    CHECK((q.M - Eigen::Matrix2d{{-2.0, 0.0}, {0.0, 1.0}}).norm() < 1e-15);
    q = bk_quadratic({0.0, 0.0, 0.0, 0.0});
    CHECK(q.M.norm() == 0.0);
    CHECK(q.b.norm() == 0.0);
    CHECK(q.c == 0.0);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> X(-3.0, 3.0), Y(0.01, 3.0);
    int bad = 0;
    for (int t = 0; t < 2000; ++t) {
      const ConicTheta th{N(rng), N(rng), N(rng), N(rng)};
      const auto bq = bk_quadratic(th);
      const Complex z(X(rng), Y(rng));
      const double f = th.form(z), g = bq.evaluate(bk_map(z));
      const double eta = bk_map(z)(0);
      CHECK(g == doctest::Approx((1.0 - eta) * (1.0 - eta) * f).epsilon(1e-9).scale(1.0));
      if (std::abs(f) > 1e-9) bad += (f > 0) != (g > 0);
    }
    CHECK(bad == 0);
  }

  TEST_CASE("curvature numerator") {
    CHECK(curvature_numerator(ConicTheta{2.0, 1.0, 0.0, -1.0}) == doctest::Approx(8.0));
    CHECK(curvature_numerator(ConicTheta{1.0, 2.0, 0.0, -1.0}) == doctest::Approx(-32.0));
    CHECK(curvature_numerator(ConicTheta{1.0, 1.0, 0.0, -1.0}) == 0.0);
    CHECK_THROWS_AS(curvature_numerator(ConicTheta{1.0, 0.0, 0.0, -1.0}), InvalidArgument);

    std::mt19937_64 rng(12);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
      const double t11 = N(rng), t22 = N(rng), t13 = N(rng), t33 = N(rng);
      if (!oracle::indefinite3(t11, t22, t13, t33)) continue;
      const ConicTheta th{t11, t22, t13, t33};
      // 8 (b' adj(M) b - c det M) from the quadratic's entries.
      const double alpha = t11 - t22;
      const double m11 = t33 - t22, m12 = t13, m22 = alpha;
      const double b1 = -t33, b2 = -t13, c = t22 + t33;
      const double ref = 8.0 * (b1 * b1 * m22 - 2.0 * b1 * b2 * m12 + b2 * b2 * m11 - c * (m11 * m22 - m12 * m12));
      const double closed = curvature_numerator(th);
      CHECK(std::abs(closed - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
      CHECK(std::abs(curvature_numerator(bk_quadratic(th)) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    }
  }

  TEST_CASE("h-convexity") {
    CHECK(is_h_convex({2.0, 1.0, 0.0, -1.0}));
    CHECK_FALSE(is_h_convex({1.0, 2.0, 0.0, -1.0}));
    CHECK(is_h_convex({1.0, 1.0, 0.0, -1.0}));
    CHECK_THROWS_AS(is_h_convex({1.0, 1.0, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(is_h_convex({-1.0, -1.0, 0.0, -1.0}), InvalidArgument);
  }

  TEST_CASE("h-convexity agrees with the chord test") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> N(0.0, 1.0);
    int checked = 0, disagreements = 0;
    for (int t = 0; t < 1500; ++t) {
      const double t11 = N(rng), t22 = N(rng), t13 = N(rng), t33 = N(rng);
      if (!oracle::indefinite3(t11, t22, t13, t33) || std::abs(t11 - t22) <= 1e-9) continue;
      const auto v = oracle::chord_test(t11, t22, t13, t33);
      if (v == oracle::ChordVerdict::no_boundary) continue;
      ++checked;
      disagreements += is_h_convex({t11, t22, t13, t33}) != (v == oracle::ChordVerdict::convex);
    }
    CHECK(checked > 500);
    CHECK(disagreements == 0);
  }

  TEST_CASE("area") {
    CHECK(region_area(Disk{0.0, 1.0}) == doctest::Approx(std::numbers::pi));
    CHECK(region_area(ConicAligned{{2.0, 1.0, 0.0, -1.0}}) == doctest::Approx(std::numbers::pi / std::sqrt(2.0)));
    CHECK(std::isinf(region_area(ExteriorDisk{0.0, 1.0})));
    CHECK(std::isinf(region_area(HalfPlane{1.0, 0.0})));
    const ConicTheta e = conic_from_ellipse(0.3, 0.5, 0.8);
    CHECK(region_area(ConicAligned{e}) == doctest::Approx(std::numbers::pi * 0.5 * 0.8));
  }
}
