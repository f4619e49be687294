#include "oracles.hpp"
#include "sgcert/error.hpp"
#include "sgcert/regions.hpp"
#include "sgcert/scaled_graph.hpp"

#include <doctest.h>

#include <sstream>

using namespace sgcert;

namespace {

SgCloud cloud_of(std::initializer_list<Complex> zs) {
  SgCloud c;
  for (Complex z : zs) c.points.push_back({z, Frequency::at(0.0), 0, false});
  return c;
}

StateSpace first_order() {
  return StateSpace(Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

double sigma_max(const CMatrix& M) { return Eigen::JacobiSVD<CMatrix>(M).singularValues()(0); }

}  // namespace

TEST_SUITE("scaled_graph") {
  TEST_CASE("gain and phase of a pair of energies") {
    auto z = gain_phase(1.0, 1.0, 1.0);
    CHECK(std::abs(z[0] - 1.0) < 1e-15);
    CHECK(std::abs(z[1] - 1.0) < 1e-15);
    z = gain_phase(1.0, 4.0, 0.0);
    CHECK(std::abs(z[0] - Complex(0.0, 2.0)) < 1e-15);
    CHECK(std::abs(z[1] - Complex(0.0, -2.0)) < 1e-15);
    z = gain_phase(1.0, 1.0, -1.0);
    CHECK(std::abs(z[0] + 1.0) < 1e-12);
    z = gain_phase(2.0, 0.0, 0.0);
    CHECK(std::abs(z[0]) == 0.0);
    // Rounding slightly past the Cauchy-Schwarz bound is clamped.
    z = gain_phase(1.0, 1.0, 1.0 + 1e-14);
    CHECK(std::abs(z[0] - 1.0) < 1e-12);
    CHECK_THROWS_AS(gain_phase(0.0, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(gain_phase(1.0, 1.0, 1.1), InvalidArgument);
  }

  TEST_CASE("frequency grid") {
    GridSpec g = GridSpec::log(1e-2, 1e2, 5);
    g.extend_to_poles = false;
    const auto w = make_grid(g);
    REQUIRE(w.size() == 7);
    CHECK(w.front() == Frequency::at(0.0));
    CHECK(w.back().infinite);
    CHECK(w[1].omega == doctest::Approx(1e-2));
    CHECK(w[3].omega == doctest::Approx(1.0));
    CHECK(w[5].omega == doctest::Approx(1e2));
    g.explicit_omegas = {3.0, 1.0};
    g.include_zero = g.include_infinity = false;
    const auto e = make_grid(g);
    REQUIRE(e.size() == 2);
    CHECK(e[0].omega == 1.0);
  }

  TEST_CASE("directions") {
    CHECK(sample_directions(1, 10, 1).size() == 1);
    const auto d = sample_directions(3, 5, 7);
    CHECK(d.size() == 3 + 3 * 4 + 5);
    for (const auto& v : d) CHECK(v.norm() == doctest::Approx(1.0));
  }

  TEST_CASE("scalar sample is the value and its conjugate") {
    CMatrix h(1, 1);
    h(0, 0) = Complex(0.5, -0.5);
    const SgCloud c = sg_matrix_sample(h, 16, 1);
    REQUIRE(c.size() == 2);
    bool hit_h = false, hit_conj = false;
    for (const auto& p : c.points) {
      hit_h |= std::abs(p.z - h(0, 0)) < 1e-14;
      hit_conj |= std::abs(p.z - std::conj(h(0, 0))) < 1e-14;
    }
    CHECK(hit_h);
    CHECK(hit_conj);
    const SgCloud real = sg_matrix_sample(CMatrix::Constant(1, 1, Complex(-2.0, 0.0)), 4, 1);
    REQUIRE(real.size() == 1);
    CHECK(std::abs(real.points[0].z + 2.0) < 1e-14);
  }

  TEST_CASE("matrix samples stay within the singular-value disks") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      const CMatrix M = CMatrix::Random(3, 3);
      const SgCloud cl = sg_matrix_sample(M, 32, t);
      CHECK(cl.conjugate_closure_error() < 1e-12);
      for (int k = 0; k < 5; ++k) {
        const double c = 2.0 * U(rng);
        CMatrix E = M;
        E.diagonal().array() -= c;
        const double bound = sigma_max(E);
        double worst = 0.0;
        for (const auto& p : cl.points) worst = std::max(worst, std::abs(p.z - c));
        CHECK(worst <= bound * (1.0 + 1e-12));
      }
    }
    // A unitary matrix has unit gain in every direction.
    const CMatrix Q = Eigen::HouseholderQR<CMatrix>(CMatrix::Random(4, 4)).householderQ();
    for (const auto& p : sg_matrix_sample(Q, 16, 3).points) CHECK(std::abs(p.z) == doctest::Approx(1.0));
  }

  TEST_CASE("Nyquist circle of the first-order lag") {
    SampleOptions opt;
    opt.grid = GridSpec::log(1e-3, 1e3, 300);
    const SgCloud c = sg_system_sample(first_order(), opt);
    CHECK(c.size() > 500);
    for (const auto& p : c.points) {
      if (p.infinite) continue;
      CHECK(std::abs(std::abs(p.z - 0.5) - 0.5) < 1e-12);
    }
    const auto w = make_grid(opt.grid, nullptr);
    CHECK(w.size() == 302);
  }

  TEST_CASE("preset clouds lie inside their certified circles") {
    SampleOptions opt;
    opt.grid = GridSpec::log(1e-3, 1e4, 200);
    opt.n_dirs = 32;
    const SgCloud c1 = sg_system_sample(preset_system("h1"), opt);
    const SgCloud c2 = sg_system_sample(preset_system("h2"), opt);
    double m1 = 1e300, m2 = 1e300;
    for (const auto& p : c1.points) m1 = std::min(m1, 0.78 - std::abs(p.z - 0.1));
    for (const auto& p : c2.points) m2 = std::min(m2, 0.75 - std::abs(p.z - 0.52));
    CHECK(m1 > 0.0);
    CHECK(m2 > 0.0);
  }

  TEST_CASE("unstable systems are rejected") {
    const StateSpace u(Matrix::Constant(1, 1, 1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    CHECK_THROWS_AS(sg_system_sample(u), UnstableSystem);
  }

  TEST_CASE("inversion, negation and distances of clouds") {
    const SgCloud a = cloud_of({2.0, Complex(0.0, 1.0), 0.0});
    const SgCloud inv = invert_cloud(a);
    REQUIRE(inv.size() == 3);
    CHECK(std::abs(inv.points[0].z - 0.5) < 1e-15);
    CHECK(std::abs(inv.points[1].z - Complex(0.0, -1.0)) < 1e-15);
    CHECK(inv.points[2].infinite);
    CHECK(inv.has_infinity());
    const SgCloud back = invert_cloud(inv);
    CHECK_FALSE(back.has_infinity());
    CHECK(std::abs(back.points[2].z) == 0.0);

    const SgCloud n = negate_cloud(a);
    CHECK(std::abs(n.points[0].z + 2.0) == 0.0);

    CHECK(cloud_distance(cloud_of({0.0, 1.0}), cloud_of({3.0, Complex(1.0, 1.0)})) == doctest::Approx(1.0));
    CHECK(cloud_distance(inv, inv) == 0.0);
    CHECK(cloud_diameter(cloud_of({0.0, 1.0, Complex(0.0, 2.0)})) == doctest::Approx(std::sqrt(5.0)));
    CHECK_THROWS_AS(cloud_distance(SgCloud{}, a), InvalidArgument);
  }

  TEST_CASE("hyperbolic hull") {
    SampleOptions opt;
    opt.grid = GridSpec::log(1e-2, 1e2, 60);
    opt.n_dirs = 16;
    const SgCloud c = sg_system_sample(preset_system("h2"), opt);
    const SgCloud hull = h_convex_hull(c);
    CHECK(hull.size() > 2);
    CHECK(hull.size() < c.size());
    CHECK(hull.conjugate_closure_error() < 1e-12);
    // Every vertex is a cloud point.
    for (const auto& v : hull.points) {
      double best = 1e300;
      for (const auto& p : c.points) best = std::min(best, std::abs(p.z - v.z));
      CHECK(best < 1e-9);
    }
    // The hull of the hull has the same vertices.
    CHECK(h_convex_hull(hull).size() == hull.size());
  }

  TEST_CASE("CSV round trip") {
    SampleOptions opt;
    opt.grid = GridSpec::log(1e-1, 1e1, 5);
    opt.n_dirs = 2;
    const SgCloud c = sg_system_sample(preset_system("h2"), opt);
    std::stringstream ss;
    write_cloud_csv(ss, c);
    CHECK(ss.str().rfind("omega,re,im,direction_index\n", 0) == 0);
    CHECK(ss.str().find("inf,") != std::string::npos);
    const SgCloud r = read_cloud_csv(ss);
    REQUIRE(r.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(std::abs(r.points[i].z - c.points[i].z) == 0.0);
      CHECK(r.points[i].freq == c.points[i].freq);
      CHECK(r.points[i].direction_index == c.points[i].direction_index);
    }
    std::istringstream bad("omega,re,im,direction_index\n1,2\n");
    CHECK_THROWS_AS(read_cloud_csv(bad), InvalidArgument);
  }

  TEST_CASE("sampling is independent of the thread count") {
    SampleOptions one;
    one.grid = GridSpec::log(1e-2, 1e3, 80);
    one.n_dirs = 12;
    one.threads = 1;
    SampleOptions four = one;
    four.threads = 4;
    const SgCloud a = sg_system_sample(preset_system("h1"), one);
    const SgCloud b = sg_system_sample(preset_system("h1"), four);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same &= a.points[i].z == b.points[i].z;
    CHECK(same);
    SampleOptions other = one;
    other.seed = 2;
    const SgCloud d = sg_system_sample(preset_system("h1"), other);
    bool differs = false;
    for (std::size_t i = 0; i < std::min(a.size(), d.size()); ++i) differs |= a.points[i].z != d.points[i].z;
    CHECK(differs);
  }
}
