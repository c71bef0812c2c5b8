#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "stabcert/stationarity.hpp"

using namespace stabcert;
using fixtures::vec;

TEST_CASE("planar instance: multipliers at the three boundary KKT points") {
  const QpInstance p = fixtures::planar();
  for (double sign : {1.0, -1.0}) {
    const DerivativeSnapshot s = qp_snapshot(p, vec({-0.125, sign * fixtures::kRoot63}));
    const CaseInfo info = classify_case(s);
    CHECK(info.tag == CaseTag::BoundaryPositive);
    CHECK(std::abs(info.lambda - 8.0) <= 1e-12);
  }
  const CaseInfo outer = classify_case(qp_snapshot(p, vec({-1.0, 0.0})));
  CHECK(outer.tag == CaseTag::BoundaryPositive);
  CHECK(std::abs(outer.lambda - 1.0) <= 1e-12);
}

TEST_CASE("interior and zero-multiplier cases") {
  const QpInstance interior(Matrix::Identity(2, 2), Vector::Zero(2), Matrix::Identity(2, 2), Vector::Zero(2), -0.5);
  CHECK(classify_case(qp_snapshot(interior, Vector::Zero(2))).tag == CaseTag::Interior);

  // Minimizer of ½‖x − e1‖² on the unit ball touches the boundary with λ = 0.
  const QpInstance zero(Matrix::Identity(2, 2), vec({-1.0, 0.0}), Matrix::Identity(2, 2), Vector::Zero(2), -0.5);
  const CaseInfo info = classify_case(qp_snapshot(zero, vec({1.0, 0.0})));
  CHECK(info.tag == CaseTag::BoundaryZero);
  CHECK(info.lambda == 0.0);
}

TEST_CASE("non-stationary, infeasible and MFCQ-violating points") {
  const QpInstance p = fixtures::planar();
  SUBCASE("wrong point on the boundary") {
    const DerivativeSnapshot s = qp_snapshot(p, vec({1.0, 0.0}));
    const StationarityCheck chk = check_stationarity(s);
    CHECK_FALSE(chk.is_stationary);
    CHECK(chk.residual > 0.5);
    CHECK_THROWS_AS(classify_case(s), StationarityError);
  }
  SUBCASE("infeasible point") {
    const StationarityCheck chk = check_stationarity(qp_snapshot(p, vec({2.0, 0.0})));
    CHECK_FALSE(chk.feasible);
    CHECK(std::isinf(chk.residual));
  }
  SUBCASE("vanishing constraint gradient") {
    // F = ½‖x‖² on the single feasible point 0.
    const QpInstance deg(Matrix::Identity(1, 1), vec({1.0}), Matrix::Identity(1, 1), Vector::Zero(1), 0.0);
    const DerivativeSnapshot s = qp_snapshot(deg, Vector::Zero(1));
    CHECK_FALSE(check_mfcq(s));
    const StationarityCheck chk = check_stationarity(s);
    CHECK_FALSE(chk.mfcq_ok);
    CHECK_THROWS_AS(stationarity_residual(s), MfcqError);
  }
}

TEST_CASE("boundary residual equals the distance to the normal ray") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 40; ++k) {
    const Vector g = fixtures::random_vector(3, rng);
    const Vector x = fixtures::random_vector(3, rng).normalized();
    DerivativeSnapshot s;
    s.x_bar = x;
    s.grad_f0 = g;
    s.hess_xx_f0 = Matrix::Identity(3, 3);
    s.F_value = 0.0;
    s.grad_x_F = x;
    s.hess_xx_F = Matrix::Identity(3, 3);
    s.qp_structure = true;
    CHECK(stationarity_residual(s) == doctest::Approx(oracle::ray_distance_grid(-g, x)).epsilon(1e-7));
  }
}
