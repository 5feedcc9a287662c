#include <doctest.h>

#include <cmath>

#include "fcm/core.hpp"
#include "fcm/rng.hpp"

using namespace fcm;

namespace {
const ActivationSpec kSig1{Family::Sigmoid, 1.0};
const ActivationSpec kSig5{Family::Sigmoid, 5.0};
const ActivationSpec kTanh1{Family::Tanh, 1.0};
}  // namespace

TEST_CASE("activation spec rejects non-positive lambda") {
  CHECK_THROWS_AS(ActivationSpec(Family::Sigmoid, 0.0), ConfigError);
  CHECK_THROWS_AS(ActivationSpec(Family::Tanh, -1.0), ConfigError);
  CHECK_THROWS_AS(family_from_string("relu"), ConfigError);
  CHECK(family_from_string("tanh") == Family::Tanh);
}

TEST_CASE("activate examples") {
  CHECK(activate(0.0, kSig5) == 0.5);
  CHECK(activate(0.0, kTanh1) == 0.0);
  // 1 / (1 + e^{-ln 3}) = 1 / (1 + 1/3) = 3/4
  CHECK(activate(std::log(3.0), kSig1) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("activate_inverse examples") {
  CHECK(activate_inverse(0.5, kSig5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(activate_inverse(0.0, kTanh1) == 0.0);
  CHECK(activate_inverse(0.75, kSig1) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(std::log(3.0) == doctest::Approx(1.09861).epsilon(1e-5));
}

TEST_CASE("activate_inverse clamps out-of-range observations") {
  const double eps = 1e-6;
  CHECK(activate_inverse(1.3, kSig1, eps) == activate_inverse(1.0 - eps, kSig1, eps));
  CHECK(activate_inverse(-0.2, kSig1, eps) == activate_inverse(eps, kSig1, eps));
  CHECK(std::isfinite(activate_inverse(1.0, kTanh1, eps)));
  CHECK(activate_inverse(-1.0, kTanh1, eps) == -activate_inverse(1.0, kTanh1, eps));
  CHECK_THROWS_AS(activate_inverse(0.5, kSig1, 0.0), ConfigError);
  CHECK_THROWS_AS(activate_inverse(0.5, kSig1, 0.5), ConfigError);
}

TEST_CASE("activation is monotone on a grid") {
  for (const auto& spec : {kSig1, kSig5, kTanh1, ActivationSpec{Family::Tanh, 3.3}}) {
    double prev = activate(-10.0, spec);
    for (int i = 1; i <= 4000; ++i) {
      const double v = activate(-10.0 + 0.005 * i, spec);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("inverse round-trip inside the clamped domain") {
  Rng rng(7);
  const double eps = 1e-6;
  double worst = 0.0;
  for (const auto& spec : {kSig1, kSig5, kTanh1, ActivationSpec{Family::Tanh, 0.4}}) {
    for (int i = 0; i < 2000; ++i) {
      // keep away from the clamp edges where the inverse is ill-conditioned
      const double y = rng.uniform(spec.range_low() + 0.01, spec.range_high() - 0.01);
      worst = std::max(worst, std::abs(activate(activate_inverse(y, spec, eps), spec) - y));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("weight matrix invariants") {
  CHECK_THROWS_AS(WeightMatrix(0), DimensionError);
  CHECK_THROWS_AS(WeightMatrix(Matrix::Zero(2, 3)), DimensionError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = 1.5;
  CHECK_THROWS_AS(WeightMatrix{bad}, DataError);
  WeightMatrix w(2);
  CHECK_THROWS_AS(w.set(0, 0, -1.01), DataError);
  w.set(0, 1, -1.0);
  CHECK(w(0, 1) == -1.0);
}

TEST_CASE("step examples") {
  const WeightMatrix zero(3);
  const StateVector any = (StateVector(3) << 0.3, 0.9, 0.1).finished();
  CHECK(step(any, zero, kSig5) == StateVector::Constant(3, 0.5));
  CHECK(step(any, zero, kTanh1) == StateVector::Zero(3));

  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  const StateVector out = step((StateVector(2) << 1, 0).finished(), WeightMatrix(m), kSig1);
  CHECK(out(0) == 0.5);
  CHECK(out(1) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
  CHECK(out(1) == doctest::Approx(0.73106).epsilon(1e-5));

  CHECK_THROWS_AS(step(StateVector::Zero(2), zero, kSig1), DimensionError);
}

TEST_CASE("simulate examples and properties") {
  const WeightMatrix zero(4);
  const StateVector x0 = StateVector::Constant(4, 0.8);
  const Matrix traj = simulate(x0, zero, kSig5, 3);
  CHECK(traj.rows() == 3);
  CHECK(traj == Matrix::Constant(3, 4, 0.5));

  Rng rng(11);
  Matrix wm(5, 5);
  for (Eigen::Index i = 0; i < wm.size(); ++i) wm(i) = rng.uniform(-1, 1);
  const WeightMatrix w(wm);
  StateVector init(5);
  for (Eigen::Index i = 0; i < 5; ++i) init(i) = rng.uniform(0, 1);

  const Matrix one = simulate(init, w, kSig1, 1);
  CHECK(one.rows() == 1);
  CHECK(Vector(one.row(0).transpose()) == step(init, w, kSig1));

  const Matrix a = simulate(init, w, kTanh1, 50);
  const Matrix b = simulate(init, w, kTanh1, 50);
  CHECK(a == b);
  CHECK(a.maxCoeff() < 1.0);
  CHECK(a.minCoeff() > -1.0);
  const Matrix s = simulate(init, w, kSig1, 50);
  CHECK(s.maxCoeff() < 1.0);
  CHECK(s.minCoeff() > 0.0);

  CHECK_THROWS(simulate(init, w, kSig1, 0));
}

TEST_CASE("response set validation and slicing") {
  ResponseSet rs;
  CHECK_THROWS_AS(rs.validate(), DataError);
  rs.initials = {StateVector::Zero(2), StateVector::Zero(2)};
  rs.sequences = {Matrix::Zero(3, 2), Matrix::Zero(3, 2)};
  CHECK_NOTHROW(rs.validate());
  CHECK_THROWS_AS(rs.validate(4), DataError);
  rs.sequences[1] = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(rs.validate(), DimensionError);
  rs.sequences[1] = Matrix::Ones(3, 2);
  const ResponseSet rest = rs.without(0);
  CHECK(rest.m() == 1);
  CHECK(rest.sequences[0] == Matrix::Ones(3, 2));
  CHECK(rs.only(0).sequences[0] == Matrix::Zero(3, 2));
  CHECK_FALSE(rs == rest);
}
