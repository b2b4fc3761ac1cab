#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sharp_subgrad/analysis.hpp"
#include "sharp_subgrad/problems.hpp"
#include "sharp_subgrad/solvers.hpp"

using namespace sharp_subgrad;
using sharp_subgrad::testing::vec;

namespace {

StepRecord record(long k, StepKind kind, double f = 1.0, std::optional<double> gamma = {},
                  double grad_norm = 1.0) {
  StepRecord r;
  r.iteration = k;
  r.kind = kind;
  r.f_value = f;
  r.gamma = gamma;
  r.grad_norm = grad_norm;
  return r;
}

GeneratorSpec synthetic(std::uint64_t seed) {
  GeneratorSpec s;
  s.family = Family::SyntheticSharp;
  s.n = 20;
  s.m = 5;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("projection inequality examples") {
  const ProjectionCheck still = check_projection_inequality(vec({0.3}), vec({0.3}), vec({0.0}), 0.0, vec({1.0}), 0.0);
  CHECK(still.holds);
  CHECK(still.residual == 0.0);

  const ProjectionCheck exact = check_projection_inequality(vec({1.0}), vec({0.0}), vec({0.0}), 1.0, vec({1.0}), 0.0);
  CHECK(exact.holds);
  CHECK(exact.residual == 0.0);

  const Projector half = Projector::box(vec({0.5}), vec({INFINITY}));
  const Vector next = half.project(vec({1.0 - 1.0}));
  CHECK(next[0] == 0.5);
  const ProjectionCheck clipped = check_projection_inequality(vec({1.0}), next, vec({0.5}), 1.0, vec({1.0}), 0.0);
  CHECK(clipped.holds);
  CHECK(clipped.residual == doctest::Approx(-0.25));

  const ProjectionCheck broken = check_projection_inequality(vec({1.0}), vec({3.0}), vec({0.0}), 1.0, vec({1.0}), 1e-9);
  CHECK_FALSE(broken.holds);
}

TEST_CASE("bound sequence examples") {
  RunTrace empty;
  CHECK(bound_sequence(empty, {1.0, 2.0, std::nullopt, 1.0}, TheoremVariant::Theorem1, 4.0).per_iteration_bound ==
        std::vector<double>{4.0});

  RunTrace productive;
  productive.records = {record(0, StepKind::Productive), record(1, StepKind::Productive)};
  const auto saturated = bound_sequence(productive, {1.0, 1.0, std::nullopt, 1.0}, TheoremVariant::Theorem1, 1.0);
  CHECK(saturated.per_iteration_bound[1] == 0.0);
  CHECK(saturated.per_iteration_bound[2] == 0.0);

  RunTrace mixed;
  mixed.records = {record(0, StepKind::Productive), record(1, StepKind::Nonproductive, 1.0, 0.5, 2.0)};
  const auto b = bound_sequence(mixed, {1.0, 2.0, std::nullopt, 1.0}, TheoremVariant::Theorem1, 1.0);
  REQUIRE(b.per_iteration_bound.size() == 3);
  CHECK(b.per_iteration_bound[0] == 1.0);
  CHECK(b.per_iteration_bound[1] == doctest::Approx(0.75));
  CHECK(b.per_iteration_bound[2] == doctest::Approx(0.65625));
  CHECK(b.flagged.empty());
  const auto c = bound_sequence(mixed, {1.0, 2.0, std::nullopt, 1.0}, TheoremVariant::Theorem2, 1.0);
  CHECK(c.per_iteration_bound[2] == doctest::Approx(0.65625));
}

TEST_CASE("bound sequence flags inconsistent parameters") {
  RunTrace t;
  t.records = {record(0, StepKind::Productive), record(1, StepKind::Nonproductive, 1.0, std::nullopt, 2.0),
               record(2, StepKind::Nonproductive, 1.0, 0.5, 0.1)};
  const auto b = bound_sequence(t, {10.0, 1.0, std::nullopt, 1.0}, TheoremVariant::Theorem1, 1.0);
  CHECK(b.flagged == std::vector<long>{0, 1, 2});
  CHECK(b.per_iteration_bound == std::vector<double>{1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("theorem alternative holds along synthetic runs and fails with inflated alpha") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ProblemInstance p = generate(synthetic(seed));
    for (Algorithm algo : {Algorithm::EpsSwitching, Algorithm::ConditionalSwitching}) {
      SolverConfig c;
      c.algorithm = algo;
      c.max_iters = 300;
      const RunTrace t = run_solver(p, c);
      const auto variant = algo == Algorithm::EpsSwitching ? TheoremVariant::Theorem1 : TheoremVariant::Theorem2;
      const double alpha = algo == Algorithm::EpsSwitching ? p.ground_truth->eps_sharpness_alpha(c.epsilon)
                                                           : *p.ground_truth->sharpness_alpha;
      ContractionParams params{alpha, p.lipschitz_f, p.lipschitz_g, 1.0};
      const TheoremReport ok = verify_theorem_alternative(t, p, params, c.epsilon, variant);
      CHECK(ok.passed);
      CHECK(ok.checked == static_cast<long>(t.records.size()) + 1);
      params.alpha *= 10.0;
      CHECK_FALSE(verify_theorem_alternative(t, p, params, c.epsilon, variant).passed);
    }
  }
}

TEST_CASE("theorem alternative needs ground truth") {
  ProblemInstance p = sharp_subgrad::testing::abs_on_line(1.0, 10.0, 1.0);
  RunTrace t;
  CHECK_THROWS_AS(verify_theorem_alternative(t, p, {}, 1e-3, TheoremVariant::Theorem1), MissingGroundTruthError);
}

TEST_CASE("an eps-solution satisfies the alternative regardless of the bound") {
  ProblemInstance p = sharp_subgrad::testing::abs_on_line(1.0, 10.0, 1.0);
  GroundTruth gt;
  gt.f_star = 0.0;
  gt.solutions = {vec({0.0})};
  p.ground_truth = gt;
  RunTrace t;
  StepRecord r = record(0, StepKind::Productive, 1e-4);
  r.g_value = -1.0;
  r.dist_to_solution = 1e-4;
  t.records = {r};
  t.final_f = 1e-4;
  t.final_g = -1.0;
  t.final_dist = 1e-4;
  // alpha = 0.01 makes the bound useless after one step.
  const TheoremReport rep = verify_theorem_alternative(t, p, {0.01, 1.0, std::nullopt, 1.0}, 1e-3,
                                                       TheoremVariant::Theorem1);
  CHECK(rep.passed);
  CHECK(rep.eps_solutions == 2);
}

TEST_CASE("sharpness estimate") {
  GeneratorSpec s = synthetic(4);
  const ProblemInstance p = generate(s);
  const double a = estimate_sharpness(p, 2000, 1);
  CHECK(a >= 1.0 - 1e-12);
  CHECK(a <= 1.0);

  ProblemInstance scaled = p;
  scaled.objective = Function([f = p.objective](const Vector& x) { return 2.0 * f.value(x); },
                              [f = p.objective](const Vector& x) { return Vector(2.0 * f.subgradient(x)); });
  CHECK(estimate_sharpness(scaled, 2000, 1) == doctest::Approx(2.0 * a).epsilon(1e-12));

  GeneratorSpec r;
  r.family = Family::RatioDistances;
  r.n = 5;
  r.seed = 2;
  const ProblemInstance ratio = generate(r);
  const double few = estimate_sharpness(ratio, 100, 3);
  const double many = estimate_sharpness(ratio, 1000, 3);
  CHECK(many <= few);
  CHECK(many >= *ratio.ground_truth->sharpness_alpha - 1e-12);

  CHECK_THROWS(estimate_sharpness(p, 0, 1));
}

TEST_CASE("f_bar window") {
  RunTrace t;
  t.records = {record(0, StepKind::Productive, 2.0), record(1, StepKind::Productive, 1.0),
               record(2, StepKind::Productive, 0.0)};
  const auto exact = check_fbar_window(t, {0.0, 1.0, 0.0});
  CHECK(exact.compliant == std::vector<long>{0, 1});
  CHECK(exact.degenerate == std::vector<long>{2});
  CHECK(exact.compliant_fraction == 1.0);

  // f_bar halfway between f* and f(x_0).
  const auto half = check_fbar_window(t, {1.0, 0.5, 0.0});
  CHECK(*half.c_values[0] == doctest::Approx(0.5));
  CHECK(half.compliant == std::vector<long>{0});
  CHECK(half.noncompliant == std::vector<long>{1});
  CHECK(half.compliant_fraction == doctest::Approx(0.5));
  CHECK(check_fbar_window(t, {1.0, 0.6, 0.0}).compliant.empty());

  CHECK_THROWS(check_fbar_window(t, {1.0, 0.5, std::nullopt}));
}

TEST_CASE("reports serialize") {
  RunTrace t;
  t.records = {record(0, StepKind::Productive, 2.0)};
  const auto j = to_json(check_fbar_window(t, {1.0, 0.5, 0.0}));
  CHECK(j.at("compliant_fraction").get<double>() == 1.0);
  const auto p = to_json(ContractionParams{0.5, 1.0, std::nullopt, 1.0});
  CHECK(p.at("M_g").is_null());
}
