#include "oracles.hpp"
#include "sgcert/error.hpp"
#include "sgcert/lti.hpp"

#include <doctest.h>

using namespace sgcert;

namespace {

StateSpace first_order() {
  return StateSpace(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0),
                    Matrix::Zero(1, 1));
}

CMatrix direct_eval(const RationalMatrixTF& tf, Complex s) {
  CMatrix H(tf.size(), tf.size());
  for (Eigen::Index i = 0; i < tf.size(); ++i)
    for (Eigen::Index j = 0; j < tf.size(); ++j)
      H(i, j) = oracle::poly(tf.entry(i, j).num, s) / oracle::poly(tf.entry(i, j).den, s);
  return H;
}

}  // namespace

TEST_SUITE("lti_core") {
  TEST_CASE("realize first-order and static entries") {
    const StateSpace s = realize(RationalMatrixTF(1, {{{1.0}, {1.0, 1.0}}}));
    REQUIRE(s.states() == 1);
    CHECK(s.A()(0, 0) == doctest::Approx(-1.0));
    CHECK(s.B()(0, 0) * s.C()(0, 0) == doctest::Approx(1.0));
    CHECK(s.D()(0, 0) == doctest::Approx(0.0));

    const StateSpace g = realize(RationalMatrixTF(1, {{{2.0}, {1.0}}}));
    CHECK(g.states() == 0);
    CHECK(g.D()(0, 0) == doctest::Approx(2.0));
  }

  TEST_CASE("improper entry names its index") {
    const RationalMatrixTF tf(2, {{{1.0}, {1.0, 1.0}}, {{0.0}, {1.0}}, {{1.0, 0.0, 0.0}, {1.0, 1.0}}, {{1.0}, {1.0}}});
    try {
      (void)realize(tf);
      FAIL("expected rejection");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("(1, 0)") != std::string::npos);
    }
  }

  TEST_CASE("preset realizations agree with direct rational evaluation") {
    for (const char* name : {"h1", "h2"}) {
      const RationalMatrixTF tf = preset_tf(name);
      const StateSpace sys = realize(tf);
      for (int k = 0; k < 50; ++k) {
        const double w = 1e-3 * std::pow(1e7, k / 49.0);
        const CMatrix ref = direct_eval(tf, Complex(0.0, w));
        const CMatrix got = freq_response(sys, w);
        CHECK((got - ref).norm() <= 1e-9 * (1.0 + ref.norm()));
      }
    }
    CHECK(preset_system("h1").states() == 7);
    const CMatrix h1 = freq_response(preset_system("h1"), 1.0);
    CHECK((h1 - direct_eval(preset_h1(), Complex(0.0, 1.0))).norm() < 1e-10);
  }

  TEST_CASE("frequency response examples") {
    const StateSpace s = first_order();
    CHECK(std::abs(freq_response(s, 0.0)(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(freq_response(s, 1.0)(0, 0) - Complex(0.5, -0.5)) < 1e-15);
    CHECK(std::abs(freq_response(s, Frequency::infinity())(0, 0)) == 0.0);

    const CMatrix h2 = freq_response(preset_system("h2"), 0.0);
    CHECK(h2(0, 0).real() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(h2(0, 1).real() == doctest::Approx(0.15).epsilon(1e-4));
    CHECK(h2(1, 0).real() == doctest::Approx(-0.0667).epsilon(1e-3));
    CHECK(h2(1, 1).real() == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("singular resolvent is reported with its frequency") {
    const StateSpace osc(Matrix{{0.0, 1.0}, {-4.0, 0.0}}, Matrix{{0.0}, {1.0}}, Matrix{{1.0, 0.0}}, Matrix::Zero(1, 1));
    try {
      (void)freq_response(osc, 2.0);
      FAIL("expected SingularResolvent");
    } catch (const SingularResolvent& e) {
      CHECK(e.omega() == 2.0);
    }
  }

  TEST_CASE("conjugate symmetry on random systems") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> W(0.01, 100.0);
    for (int t = 0; t < 20; ++t) {
      Matrix A, B, C, D;
      oracle::random_stable(rng, 4, 2, A, B, C, D);
      const StateSpace sys(A, B, C, D);
      const double w = W(rng);
      const CMatrix pos = oracle::resolvent_response(A, B, C, D, Complex(0.0, w));
      const CMatrix neg = oracle::resolvent_response(A, B, C, D, Complex(0.0, -w));
      CHECK((neg - pos.conjugate()).norm() < 1e-12 * (1.0 + pos.norm()));
      CHECK((freq_response(sys, w) - pos).norm() < 1e-10 * (1.0 + pos.norm()));
    }
  }

  TEST_CASE("hermitian part") {
    CMatrix a(1, 1);
    a(0, 0) = Complex(0.0, 1.0);
    CHECK(std::abs(hermitian_part(a)(0, 0)) == 0.0);

    CMatrix m(2, 2);
    m << Complex(1, 1), 2.0, 0.0, 3.0;
    CMatrix expect(2, 2);
    expect << 1.0, 1.0, 1.0, 3.0;
    CHECK((hermitian_part(m) - expect).norm() < 1e-15);

    const CMatrix r = CMatrix::Random(4, 4);
    const CMatrix h = hermitian_part(r);
    CHECK((h - h.adjoint()).norm() < 1e-15);
    CHECK((hermitian_part(h) - h).norm() < 1e-15);
    const CMatrix q = CMatrix::Random(4, 4);
    CHECK((hermitian_part(r + 2.0 * q) - h - 2.0 * hermitian_part(q)).norm() < 1e-14);

    CHECK_THROWS_AS(hermitian_part(CMatrix::Zero(2, 3)), InvalidArgument);
  }

  TEST_CASE("Hurwitz check") {
    auto one = [](double a) {
      return StateSpace(Matrix::Constant(1, 1, a), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    };
    auto h = is_hurwitz(one(-1.0));
    CHECK(h.stable);
    CHECK(h.abscissa == doctest::Approx(-1.0));
    h = is_hurwitz(one(0.0));
    CHECK_FALSE(h.stable);
    CHECK(h.abscissa == doctest::Approx(0.0));
    h = is_hurwitz(preset_system("h1"));
    CHECK(h.stable);
    CHECK(h.abscissa == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK_THROWS_AS(require_hurwitz(one(0.5), "test"), UnstableSystem);
  }

  TEST_CASE("dimension validation") {
    CHECK_THROWS_AS(StateSpace(Matrix::Zero(2, 3), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)),
                    InvalidArgument);
    CHECK_THROWS_AS(StateSpace(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(2, 2), Matrix::Zero(1, 1)),
                    InvalidArgument);
    CHECK_THROWS_AS(preset_system("h3"), InvalidArgument);
  }

  TEST_CASE("first-order bank") {
    const StateSpace b = first_order_bank(5);
    CHECK(b.states() == 5);
    CHECK(b.A()(0, 0) == doctest::Approx(-0.1));
    CHECK(b.A()(4, 4) == doctest::Approx(-0.3));
    const auto pr = pole_range(b);
    CHECK(pr.slowest == doctest::Approx(0.1));
    CHECK(pr.fastest == doctest::Approx(0.3));
  }
}
