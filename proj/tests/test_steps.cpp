#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sharp_subgrad/random.hpp"
#include "sharp_subgrad/steps.hpp"

using namespace sharp_subgrad;
using sharp_subgrad::testing::vec;

TEST_CASE("v_f examples") {
  const Vector x = vec({3.0, 4.0});
  const Vector y = vec({0.0, 0.0});
  CHECK(v_f(Vector::Zero(2), x, y) == 0.0);
  CHECK(v_f(vec({0.6, 0.8}), x, x) == 0.0);
  CHECK(v_f(vec({0.6, 0.8}), x, y) == doctest::Approx(5.0));
}

TEST_CASE("v_f is invariant to gradient scaling") {
  RandomStream rng(11);
  for (int t = 0; t < 100; ++t) {
    const Vector g = rng.normal_vector(5);
    const Vector x = rng.normal_vector(5);
    const Vector y = rng.normal_vector(5);
    const double s = 0.01 + 100.0 * rng.uniform();
    CHECK(v_f(s * g, x, y) == doctest::Approx(v_f(g, x, y)).epsilon(1e-12));
  }
}

TEST_CASE("objective gap is bounded by M_f v_f on distance and max-linear objectives") {
  RandomStream rng(12);
  const int n = 4;
  const Vector x_star = rng.normal_vector(n);
  for (int t = 0; t < 1000; ++t) {
    const Vector x = rng.normal_vector(n);
    const Vector grad = (x - x_star) / (x - x_star).norm();
    CHECK((x - x_star).norm() == doctest::Approx(v_f(grad, x, x_star)).epsilon(1e-12));
  }
  // f(x) = max_i <a_i, x> on the unit ball; x_* is the best of many samples.
  Eigen::MatrixXd a(3, n);
  for (int i = 0; i < 3; ++i) a.row(i) = rng.normal_vector(n).transpose();
  const double m_f = a.rowwise().norm().maxCoeff();
  auto f = [&](const Vector& x) { return (a * x).maxCoeff(); };
  Vector best = Vector::Zero(n);
  for (int t = 0; t < 20000; ++t) {
    const Vector z = rng.in_ball(n, 1.0);
    if (f(z) < f(best)) best = z;
  }
  const double f_star = f(best);
  for (int t = 0; t < 1000; ++t) {
    const Vector x = rng.in_ball(n, 1.0);
    if (f(x) < f_star) continue;
    Eigen::Index arg;
    (a * x).maxCoeff(&arg);
    const Vector grad = a.row(arg).transpose();
    CHECK(f(x) - f_star <= m_f * v_f(grad, x, best) + 1e-12);
  }
}

TEST_CASE("polyak step examples") {
  CHECK(polyak_step(2.0, 1.0, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(polyak_step(1.0, 1.0, 2.0, 1.0) == 0.0);
  const double h = polyak_step(1.0, 0.0, 1.0, 1.0);
  CHECK(h == 1.0);
  CHECK(1.0 - h * 1.0 == 0.0);
}

TEST_CASE("polyak step errors and the overestimate branch") {
  CHECK_THROWS_AS(polyak_step(2.0, 1.0, 1.0, 0.0), ZeroGradientError);
  CHECK_THROWS_AS(polyak_step(2.0, 1.0, 1.0, 1e-13), ZeroGradientError);
  CHECK(polyak_step(0.5, 1.0, 1.0, 1.0) == 0.0);
  CHECK(polyak_step(0.5, 1.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("constraint step examples") {
  CHECK(constraint_step(0.5, 1.0) == doctest::Approx(0.5));
  CHECK(constraint_step(1.0, 2.0) == doctest::Approx(0.25));
  CHECK(constraint_step(1e-300, 1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(constraint_step(1.0, 0.0), ZeroGradientError);
}

TEST_CASE("baseline steps examples") {
  CHECK(baseline_steps(0.1, 2.0, 1.0).first == doctest::Approx(0.025));
  CHECK(baseline_steps(0.1, 2.0, 1.0).second == 1.0);
  CHECK(baseline_objective_step(1e-3, 1.0) == doctest::Approx(1e-3));
  CHECK_THROWS_AS(baseline_constraint_step(0.0), ZeroGradientError);
  CHECK_THROWS_AS(baseline_objective_step(0.1, 0.0), ZeroGradientError);
}

TEST_CASE("gamma recursion of the epsilon scheme") {
  ContractionParams p{1.0, 1.0, std::nullopt, 1.0};
  CHECK(gamma_update_eps(0.5, StepKind::Productive, p) == 0.0);
  CHECK(gamma_update_eps(0.5, StepKind::Nonproductive, p, 2.0) == doctest::Approx(0.467707).epsilon(1e-6));
  p.m_f = 2.0;
  CHECK(gamma_update_eps(0.8, StepKind::Productive, p) == doctest::Approx(0.692820).epsilon(1e-6));
  CHECK_THROWS(gamma_update_eps(0.5, StepKind::Nonproductive, p));
  CHECK_THROWS_AS(gamma_update_eps(0.5, StepKind::Nonproductive, p, 0.5), ParameterError);
}

TEST_CASE("gamma recursion of the conditional scheme") {
  ContractionParams p{1.0, 1.0, std::nullopt, 1.0};
  CHECK(gamma_update_cond(0.5, StepKind::Productive, p) == 0.0);
  CHECK(gamma_update_cond(0.5, StepKind::Nonproductive, p, 2.0) == doctest::Approx(0.467707).epsilon(1e-6));
  p.big_c = 0.5;
  CHECK(gamma_update_cond(0.9, StepKind::Productive, p) == doctest::Approx(0.734847).epsilon(1e-6));
}

TEST_CASE("gamma updates decrease strictly inside the admissible range") {
  RandomStream rng(13);
  for (int t = 0; t < 200; ++t) {
    ContractionParams p{0.1 + 0.8 * rng.uniform(), 1.0, std::nullopt, 0.1 + 0.9 * rng.uniform()};
    const double gamma = 0.05 + 0.9 * rng.uniform();
    const double gn = 1.0 + rng.uniform();
    for (StepKind kind : {StepKind::Productive, StepKind::Nonproductive}) {
      const double e = gamma_update_eps(gamma, kind, p, gn);
      const double c = gamma_update_cond(gamma, kind, p, gn);
      CHECK(e > 0.0);
      CHECK(e < gamma);
      CHECK(c > 0.0);
      CHECK(c < gamma);
    }
  }
}

TEST_CASE("contraction factor examples") {
  CHECK(contraction_factor({1.0, 1.0, std::nullopt, 1.0}, RateVariant::EpsProductive) == 0.0);
  CHECK(contraction_factor({1.0, 2.0, std::nullopt, 1.0}, RateVariant::CondProductive) ==
        doctest::Approx(0.75));
  CHECK(contraction_factor({1.0, 2.0, 1.0, 0.5}, RateVariant::UniformRemark) == doctest::Approx(0.9375));
  CHECK(contraction_factor({1.0, 1.0, 2.0, 0.5}, RateVariant::UniformRemark) == doctest::Approx(0.9375));
  CHECK_THROWS_AS(contraction_factor({3.0, 1.0, std::nullopt, 1.0}, RateVariant::EpsProductive),
                  ParameterError);
}

TEST_CASE("productive factors coincide at C = 1") {
  for (double a : {0.1, 0.5, 0.9}) {
    const ContractionParams p{a, 1.0, std::nullopt, 1.0};
    CHECK(contraction_factor(p, RateVariant::EpsProductive) ==
          contraction_factor(p, RateVariant::CondProductive));
  }
}

TEST_CASE("contraction params validation") {
  CHECK_THROWS(ContractionParams{0.0, 1.0, std::nullopt, 1.0}.validate());
  CHECK_THROWS(ContractionParams{1.0, 0.0, std::nullopt, 1.0}.validate());
  CHECK_THROWS(ContractionParams{1.0, 1.0, std::nullopt, 1.5}.validate());
}
