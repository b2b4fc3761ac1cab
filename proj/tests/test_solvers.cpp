#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "sharp_subgrad/problems.hpp"
#include "sharp_subgrad/solvers.hpp"

using namespace sharp_subgrad;
using sharp_subgrad::testing::abs_on_line;
using sharp_subgrad::testing::vec;

namespace {

SolverConfig config(Algorithm algo, double eps, long iters) {
  SolverConfig c;
  c.algorithm = algo;
  c.epsilon = eps;
  c.max_iters = iters;
  c.record_points = true;
  return c;
}

GeneratorSpec synthetic(std::uint64_t seed, int n = 20) {
  GeneratorSpec s;
  s.family = Family::SyntheticSharp;
  s.n = n;
  s.m = 5;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("select_constraint examples") {
  const std::vector<double> feasible{-1.0, -2.0};
  CHECK(select_constraint(feasible, 0.0, Aggregation::MaxOfConstraints).kind == StepKind::Productive);
  CHECK(select_constraint(feasible, 0.0, Aggregation::FirstViolated).kind == StepKind::Productive);

  const std::vector<double> g{-1.0, 0.2, 0.3};
  const SwitchDecision first = select_constraint(g, 0.1, Aggregation::FirstViolated);
  CHECK(first.kind == StepKind::Nonproductive);
  CHECK(first.constraint_index == 1);
  CHECK(first.evaluated == 2);

  const SwitchDecision max = select_constraint(g, 0.1, Aggregation::MaxOfConstraints);
  CHECK(max.kind == StepKind::Nonproductive);
  CHECK(max.constraint_index == 2);
  CHECK(max.aggregated_g == 0.3);
  CHECK(max.evaluated == 3);

  const std::vector<double> tie{0.5, 0.5};
  CHECK(select_constraint(tie, 0.0, Aggregation::MaxOfConstraints).constraint_index == 0);
  CHECK_THROWS(select_constraint(std::vector<double>{}, 0.0, Aggregation::MaxOfConstraints));
}

TEST_CASE("epsilon switching on the line") {
  const RunTrace one = run_eps_switching(abs_on_line(1.0, 10.0, 1.0), config(Algorithm::EpsSwitching, 0.1, 1));
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0].kind == StepKind::Productive);
  CHECK(one.records[0].step_size == 1.0);
  CHECK(one.final_point[0] == 0.0);
  CHECK(one.productive_set == std::vector<long>{0});

  const RunTrace two = run_eps_switching(abs_on_line(1.0, 0.5, 1.0), config(Algorithm::EpsSwitching, 0.1, 2));
  REQUIRE(two.records.size() == 2);
  CHECK(two.records[0].kind == StepKind::Nonproductive);
  CHECK(two.records[0].step_size == 0.5);
  CHECK((*two.records[1].point)[0] == 0.5);
  CHECK(two.records[1].kind == StepKind::Productive);
  CHECK(two.records[1].g_value == 0.0);

  const RunTrace none = run_eps_switching(abs_on_line(1.0, 10.0, 1.0), config(Algorithm::EpsSwitching, 0.1, 0));
  CHECK(none.records.empty());
  CHECK(none.final_point[0] == 1.0);
}

TEST_CASE("conditional switching on the line") {
  const RunTrace one =
      run_conditional_switching(abs_on_line(1.0, 10.0, 1.0), config(Algorithm::ConditionalSwitching, 0.1, 1));
  CHECK(one.records[0].kind == StepKind::Productive);
  CHECK(one.final_point[0] == 0.0);

  // g = 2x - 0.5 at x = 1: 1 < 1.5, step g / ||grad g||^2 along grad g = 2.
  const RunTrace two =
      run_conditional_switching(abs_on_line(2.0, 0.5, 1.0), config(Algorithm::ConditionalSwitching, 0.1, 1));
  CHECK(two.records[0].kind == StepKind::Nonproductive);
  CHECK(two.records[0].step_size == doctest::Approx(0.375));
  CHECK(two.final_point[0] == doctest::Approx(0.25));

  CHECK(run_conditional_switching(abs_on_line(2.0, 0.5, 1.0), config(Algorithm::ConditionalSwitching, 0.1, 0))
            .records.empty());
}

TEST_CASE("baseline switching on the line") {
  const ProblemInstance p = abs_on_line(0.0, 1.0, 1.0);  // g == -1
  const RunTrace t = run_baseline_switching(p, config(Algorithm::BaselineSwitching, 0.1, 10));
  REQUIRE(t.records.size() == 10);
  for (long k = 0; k < 10; ++k) {
    CHECK(t.records[k].kind == StepKind::Productive);
    CHECK(t.records[k].step_size == doctest::Approx(0.1));
    CHECK((*t.records[k].point)[0] == doctest::Approx(1.0 - 0.1 * k));
  }
  CHECK(t.final_point[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(run_baseline_switching(p, config(Algorithm::BaselineSwitching, 0.1, 0)).records.empty());
}

TEST_CASE("solver rejects a config for another algorithm") {
  const ProblemInstance p = abs_on_line(1.0, 10.0, 1.0);
  CHECK_THROWS_AS(run_eps_switching(p, config(Algorithm::BaselineSwitching, 0.1, 1)), std::invalid_argument);
}

TEST_CASE("zero constraint gradient carries the iteration index") {
  ProblemInstance p = abs_on_line(0.0, -1.0, 1.0);  // g == 1 with zero gradient
  try {
    run_eps_switching(p, config(Algorithm::EpsSwitching, 0.1, 5));
    FAIL("expected ZeroGradientError");
  } catch (const ZeroGradientError& e) {
    CHECK(e.iteration() == 0);
  }
}

TEST_CASE("NaN oracle aborts the run") {
  ProblemInstance p = abs_on_line(1.0, 10.0, 1.0);
  p.objective = Function([](const Vector&) { return std::nan(""); }, [](const Vector& x) { return x; });
  CHECK_THROWS_AS(run_eps_switching(p, config(Algorithm::EpsSwitching, 0.1, 5)), OracleError);
}

TEST_CASE("early stop certificate") {
  SolverConfig c = config(Algorithm::EpsSwitching, 0.1, 50);
  c.early_stop = true;
  const RunTrace t = run_eps_switching(abs_on_line(1.0, 10.0, 1.0), c);
  CHECK(t.terminated_early);
  CHECK(t.records.size() == 1);
}

TEST_CASE("partition, branch fidelity and monotone distance on synthetic instances") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance p = generate(synthetic(seed));
    for (Algorithm algo : {Algorithm::EpsSwitching, Algorithm::ConditionalSwitching, Algorithm::BaselineSwitching}) {
      SolverConfig c = config(algo, 1e-3, 300);
      c.fbar.f_bar = 0.0;
      const RunTrace t = run_solver(p, c);
      CHECK(partition_is_consistent(t));
      for (const StepRecord& r : t.records) {
        if (algo == Algorithm::EpsSwitching) {
          CHECK((r.kind == StepKind::Productive) == (r.g_value <= c.epsilon));
        }
        if (algo == Algorithm::ConditionalSwitching) {
          CHECK((r.kind == StepKind::Productive) == (r.f_value - c.fbar.f_bar >= r.g_value));
        }
      }
      if (algo == Algorithm::BaselineSwitching) continue;
      std::vector<double> d;
      for (const StepRecord& r : t.records) d.push_back(*r.dist_to_solution);
      d.push_back(*t.final_dist);
      for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] <= d[k - 1] + 1e-10);
    }
  }
}

TEST_CASE("both aggregation modes reach an eps-solution; first-violated evaluates less") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    GeneratorSpec s = synthetic(seed, 10);
    s.m = 8;
    const ProblemInstance p = generate(s);
    SolverConfig c = config(Algorithm::EpsSwitching, 1e-3, 3000);
    c.record_points = false;
    const RunTrace max = run_solver(p, c);
    c.aggregation = Aggregation::FirstViolated;
    const RunTrace first = run_solver(p, c);
    CHECK(first_eps_solution(max, 0.0, 1e-3).has_value());
    CHECK(first_eps_solution(first, 0.0, 1e-3).has_value());
    CHECK(first.constraint_evaluations <= max.constraint_evaluations);
    CHECK(max.constraint_evaluations == static_cast<long>(p.constraints.size()) * 3000);
  }
}

TEST_CASE("identical inputs give identical traces") {
  const ProblemInstance p = generate(synthetic(3));
  SolverConfig c = config(Algorithm::ConditionalSwitching, 1e-3, 200);
  const RunTrace a = run_solver(p, c);
  const RunTrace b = run_solver(p, c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].f_value == b.records[k].f_value);
    CHECK(a.records[k].step_size == b.records[k].step_size);
  }
  CHECK(a.final_point == b.final_point);
}

TEST_CASE("first_eps_solution") {
  const RunTrace t = run_eps_switching(abs_on_line(1.0, 0.5, 1.0), config(Algorithm::EpsSwitching, 0.1, 2));
  CHECK(first_eps_solution(t, 0.0, 0.1) == 2);
  CHECK(first_eps_solution(t, 0.0, 0.6) == 1);
  const RunTrace none = run_eps_switching(abs_on_line(1.0, 10.0, 1.0), config(Algorithm::EpsSwitching, 0.1, 0));
  CHECK_FALSE(first_eps_solution(none, 0.0, 0.1).has_value());
}
