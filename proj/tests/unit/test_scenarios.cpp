#include <doctest.h>

#include "helpers.hpp"
#include "qbrach/scenarios.hpp"

using namespace qbrach;
using namespace qbtest;

TEST_SUITE("scenarios") {
  TEST_CASE("symmetric operator table") {
    const auto& o = symmetric_operators();
    const double r2 = std::sqrt(2.0);
    Matrix sx3 = Matrix::Zero(3, 3), sz3 = Matrix::Zero(3, 3);
    sx3(0, 2) = sx3(2, 0) = 1.0;
    sx3.diagonal() << -1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0;
    sz3.diagonal() << 2.0 / 3.0, -4.0 / 3.0, 2.0 / 3.0;
    CHECK(diff(o.sigma_x.matrix(), sx3) < 1e-14);
    CHECK(diff(o.sigma_z.matrix(), sz3) < 1e-14);
    Matrix s1 = Matrix::Zero(3, 3);
    s1(0, 1) = s1(1, 0) = s1(1, 2) = s1(2, 1) = 1.0 / r2;
    CHECK(diff(o.s1.matrix(), s1) < 1e-14);
    Matrix s3 = Matrix::Zero(3, 3);
    s3.diagonal() << 1.0, 0.0, -1.0;
    CHECK(diff(o.s3.matrix(), s3) < 1e-14);
    CHECK(hs_norm(commutator(o.sigma_z, o.sigma_x)) < 1e-14);
    CHECK(diff(commutator(o.s1, o.s2), o.s3) < 1e-14);
  }

  TEST_CASE("scenario registry") {
    CHECK(scenario_names().size() == 3);
    for (const auto& n : scenario_names()) {
      const Scenario s = make_scenario(n);
      CHECK(s.name == n);
      CHECK(classify(s.constraint).type_label == "lotus_leaf");
      CHECK_NOTHROW(scenario_chart(s, "interior"));
    }
    CHECK_THROWS_AS(make_scenario("nope"), Error);
    CHECK_THROWS_AS(symmetric_two_qubit(1.0, 0.5), Error);
    CHECK_THROWS_AS(scenario_chart(landau_zener(1, 1), "boundary_b3"), Error);
    const Scenario hs = symmetric_two_qubit(0.5, 1.0, 0.3, true);
    CHECK(std::get<BallBound>(hs.constraint.bound()).metric(3, 3) == doctest::Approx(8.0 / 3.0));
  }

  TEST_CASE("replacement of a constant arc") {
    const auto r = singular_replacement({0.0, 1.0}, {0.5, 0.5}, 0.5, 1.0);
    CHECK(r.t3 == doctest::Approx(0.5));
    CHECK(diff(r.replacement_unitary.matrix(), r.arc_unitary.matrix()) < 1e-12);
  }

  TEST_CASE("replacement with zero coupling") {
    const auto r = singular_replacement({0.2, 0.7, 1.1}, {0.0, 0.0, 0.0}, 0.5, 1.0);
    CHECK(r.t3 == doctest::Approx(0.2));
    CHECK(diff(r.replacement_unitary.matrix(), exp_op(symmetric_operators().sigma_x, 0.45).matrix()) < 1e-12);
  }

  TEST_CASE("replacement of a sin^2 arc") {
    const double w0 = 0.5, om = 1.0, t2 = kPi / w0;
    std::vector<double> t, j;
    for (int k = 0; k <= 4000; ++k) {
      t.push_back(t2 * k / 4000.0);
      j.push_back(w0 * std::pow(std::sin(w0 * t.back()), 2));
    }
    const auto r = singular_replacement(t, j, w0, om);
    CHECK(r.t3 == doctest::Approx(w0 * t2 / (2.0 * om)).epsilon(1e-6));
    CHECK(diff(r.replacement_unitary.matrix(), r.arc_unitary.matrix()) < 1e-12);
  }

  TEST_CASE("infeasible replacement") {
    try {
      singular_replacement({0.0, 1.0}, {1.0, 1.0}, 0.5, 1.0);
      FAIL("expected infeasible_replacement");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::infeasible_replacement);
    }
    CHECK_THROWS_AS(singular_replacement({0.0, 1.0}, {1.5, 0.1}, 0.5, 1.0), Error);
  }
}
