#include <doctest.h>

#include <limits>

#include "helpers.hpp"
#include "sharp_subgrad/geometry.hpp"

using namespace sharp_subgrad;
using sharp_subgrad::testing::vec;

TEST_CASE("ball projection examples") {
  const Projector unit = Projector::ball(Vector::Zero(2), 1.0);
  const Vector p = unit.project(vec({3.0, 4.0}));
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.8));

  const Vector c = vec({0.3, -2.0});
  const Projector shifted = Projector::ball(c, 1.0);
  CHECK(shifted.project(c) == c);
}

TEST_CASE("nonnegative ball projection example") {
  const Projector q = Projector::nonneg_ball(1.0, 0.0);
  const Vector p = q.project(vec({-1.0, 2.0}));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(1.0));
}

TEST_CASE("nonnegative ball with a floor stays above it") {
  const Projector q = Projector::nonneg_ball(1.0, 0.1);
  const Vector p = q.project(vec({-1.0, 5.0, 5.0}));
  CHECK(p.minCoeff() >= 0.1 - 1e-15);
  CHECK(p.norm() <= 1.0 + 1e-12);
  CHECK(p[0] == doctest::Approx(0.1));
  CHECK(q.project(p).isApprox(p, 1e-15));
}

TEST_CASE("box projection clamps componentwise") {
  const double inf = std::numeric_limits<double>::infinity();
  const Projector b = Projector::box(vec({0.0, -1.0}), vec({1.0, inf}));
  const Vector p = b.project(vec({2.0, -3.0}));
  CHECK(p == vec({1.0, -1.0}));
  CHECK(b.project(vec({0.5, 100.0})) == vec({0.5, 100.0}));
}

TEST_CASE("whole space is the identity") {
  const Vector x = vec({1.0, -2.0, 3.0});
  CHECK(Projector::whole_space().project(x) == x);
}

TEST_CASE("invalid sets and inputs are rejected") {
  CHECK_THROWS(Projector::ball(Vector::Zero(2), 0.0));
  CHECK_THROWS(Projector::box(vec({1.0}), vec({0.0})));
  CHECK_THROWS(Projector::nonneg_ball(1.0, -1.0));
  const Projector unit = Projector::ball(Vector::Zero(2), 1.0);
  CHECK_THROWS_AS(unit.project(Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(unit.project(vec({std::nan(""), 0.0})), std::invalid_argument);
}

TEST_CASE("violation measures distance from the defining inequalities") {
  const Projector unit = Projector::ball(Vector::Zero(2), 1.0);
  CHECK(unit.violation(vec({0.1, 0.1})) == 0.0);
  CHECK(unit.violation(vec({3.0, 4.0})) == doctest::Approx(4.0));
}

TEST_CASE("projector json round-trip") {
  const double inf = std::numeric_limits<double>::infinity();
  for (const Projector& p : {Projector::whole_space(), Projector::ball(vec({1.0, 2.0}), 0.5),
                             Projector::nonneg_ball(2.0, 1e-3),
                             Projector::box(vec({0.0, 1e-8}), vec({1.0, inf}))}) {
    const Projector q = projector_from_json(nlohmann::json::parse(to_json(p).dump()));
    CHECK(q.name() == p.name());
    const Vector x = vec({3.0, -4.0});
    CHECK(q.project(x) == p.project(x));
  }
}
