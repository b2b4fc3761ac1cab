// Switching subgradient schemes with productive and nonproductive steps.
#pragma once

#include <optional>
#include <span>

#include "sharp_subgrad/core.hpp"

namespace sharp_subgrad {

struct SwitchDecision {
  StepKind kind = StepKind::Productive;
  std::optional<int> constraint_index;
  double aggregated_g = 0.0;
  /// Number of constraint values inspected to reach the decision.
  int evaluated = 0;
};

/// Switching test on already-computed constraint values. A value strictly
/// above `threshold` makes the step nonproductive.
SwitchDecision select_constraint(std::span<const double> g_values, double threshold,
                                 Aggregation mode);

/// Same test evaluating the oracles lazily: under FirstViolated the scan stops
/// at the first violated constraint.
SwitchDecision select_constraint(const std::vector<Function>& constraints, const Vector& x,
                                 double threshold, Aggregation mode);

/// Productive iff g(x_k) <= epsilon; Polyak step on f, g / ||grad g||^2 on g.
RunTrace run_eps_switching(const ProblemInstance& problem, const SolverConfig& config);

/// Productive iff f(x_k) - f_bar >= g(x_k); same steps as run_eps_switching.
RunTrace run_conditional_switching(const ProblemInstance& problem, const SolverConfig& config);

/// Productive iff g(x_k) <= epsilon; steps epsilon / ||grad f||^2 and 1 / ||grad g||.
RunTrace run_baseline_switching(const ProblemInstance& problem, const SolverConfig& config);

/// Dispatches on config.algorithm.
RunTrace run_solver(const ProblemInstance& problem, const SolverConfig& config);

/// First iteration k whose iterate is an epsilon-solution (f - f* <= eps and
/// g <= eps); K when only the final point qualifies.
std::optional<long> first_eps_solution(const RunTrace& trace, double f_star, double epsilon);

}  // namespace sharp_subgrad
