#include <doctest.h>

#include "helpers.hpp"
#include "qbrach/dynamics.hpp"

using namespace qbrach;
using namespace qbtest;

namespace {

ConstraintSet xy() { return ConstraintSet(0.5 * sz(), {sx(), sy()}, TypicalBound{1.0}); }

Protocol constant(const ConstraintSet& c, double t, int cells, const Eigen::VectorXd& u) {
  return sample_protocol(c, t, cells, [&](double) { return u; }, Sampling::left);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("constant drift evolution") {
    const ConstraintSet c(sz(), {sx()}, BoxBound{{-1.0}, {1.0}});
    const Trajectory tr = evolve_unitary(constant(c, kPi / 4, 8, Eigen::VectorXd::Zero(1)));
    CHECK(diff(tr.final_unitary().matrix(), exp_op(sz(), kPi / 4).matrix()) < 1e-14);
    CHECK(tr.unitaries.size() == 9);
    CHECK(diff(tr.unitaries.front().matrix(), Matrix::Identity(2, 2)) == 0.0);
  }

  TEST_CASE("costate conjugation") {
    const ConstraintSet c(sz(), {sx()}, BoxBound{{-1.0}, {1.0}});
    const Trajectory tr = evolve_costate(sx(), evolve_unitary(constant(c, kPi / 4, 4, Eigen::VectorXd::Zero(1))));
    REQUIRE(tr.has_costates());
    CHECK(diff(tr.costates.back(), sy()) < 1e-14);
    CHECK(diff(tr.costates.front(), sx()) == 0.0);
  }

  TEST_CASE("single cell matches the exponential") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd u = xy().random_admissible(rng);
      const double t = 0.1 + 0.2 * trial;
      const Trajectory tr = evolve_unitary(constant(xy(), t, 1, u));
      CHECK(diff(tr.final_unitary().matrix(), exp_op(xy().hamiltonian(u), t).matrix()) < 1e-13);
    }
  }

  TEST_CASE("piecewise protocols compose") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd ctl(3, 2);
      for (int k = 0; k < 3; ++k) ctl.row(k) = xy().random_admissible(rng).transpose();
      const Protocol p = make_protocol({0.0, 0.3, 0.7, 1.2}, ctl, xy());
      const Trajectory tr = evolve_unitary(p);
      UnitaryOp want = UnitaryOp::identity(2);
      for (int k = 0; k < 3; ++k) want = exp_op(p.hamiltonian(k), p.grid[k + 1] - p.grid[k]) * want;
      CHECK(diff(tr.final_unitary().matrix(), want.matrix()) < 1e-13);
      for (const auto& u : tr.unitaries) CHECK(diff(u.matrix().adjoint() * u.matrix(), Matrix::Identity(2, 2)) < 1e-13);
      CHECK_THROWS_AS(conservation_report(tr), Error);
    }
  }

  TEST_CASE("conservation along a constant hamiltonian") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd u = xy().random_admissible(rng);
      const HermitianOp h = xy().hamiltonian(u);
      HermitianOp f = random_hermitian(2, rng);
      f = f * (1.0 / trace_product(h, f));
      const Trajectory tr = evolve_costate(f, evolve_unitary(constant(xy(), 2.0, 64, u)));
      const auto r = conservation_report(tr);
      CHECK(r.hf_drift < 1e-12);
      CHECK(r.f2_drift < 1e-12);
      CHECK(r.hf_initial == doctest::Approx(1.0));
    }
  }

  TEST_CASE("boundary residual ignores the global phase") {
    const UnitaryOp target = exp_op(sx(), 0.4);
    const UnitaryOp minus = UnitaryOp::assume_unitary(-target.matrix());
    const auto r = boundary_residual(target, minus);
    CHECK(std::abs(r.fidelity) < 1e-15);
    CHECK(r.phase == doctest::Approx(2.0 * std::sqrt(2.0)));
    const auto same = boundary_residual(target, target);
    CHECK(same.fidelity == doctest::Approx(0.0));
    CHECK(same.phase == 0.0);
  }

  TEST_CASE("midpoint sampling") {
    const ConstraintSet c(sz(), {sx()}, BoxBound{{-1.0}, {1.0}});
    const Protocol p = sample_protocol(
        c, 1.0, 2, [](double t) { return Eigen::VectorXd::Constant(1, t); }, Sampling::midpoint);
    CHECK(p.controls(0, 0) == doctest::Approx(0.25));
    CHECK(p.controls(1, 0) == doctest::Approx(0.75));
  }

  TEST_CASE("protocol validation") {
    const ConstraintSet c(sz(), {sx()}, BoxBound{{-1.0}, {1.0}});
    Eigen::MatrixXd ctl(2, 1);
    ctl << 0.5, 0.5;
    CHECK_THROWS_AS(make_protocol({0.0, 0.5, 0.4}, ctl, c), Error);
    CHECK_THROWS_AS(make_protocol({0.0, 0.5}, ctl, c), Error);
    ctl(1, 0) = 3.0;
    CHECK_THROWS_AS(make_protocol({0.0, 0.5, 1.0}, ctl, c), Error);
    CHECK_THROWS_AS(uniform_grid(1.0, 0), Error);
  }
}
