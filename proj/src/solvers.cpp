#include "sharp_subgrad/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sharp_subgrad/steps.hpp"

namespace sharp_subgrad {
namespace {

double checked_value(const Function& f, const Vector& x, long k, const char* what) {
  const double v = f.value(x);
  if (!std::isfinite(v))
    throw OracleError(std::string("non-finite ") + what + " value at iteration " + std::to_string(k));
  return v;
}

Vector checked_gradient(const Function& f, const Vector& x, long k, const char* what) {
  Vector g = f.subgradient(x);
  if (g.size() != x.size())
    throw OracleError(std::string(what) + " subgradient has wrong dimension");
  if (!g.allFinite())
    throw OracleError(std::string("non-finite ") + what + " subgradient at iteration " +
                      std::to_string(k));
  return g;
}

struct Decision {
  SwitchDecision switch_decision;
  std::vector<double> values;  // evaluated constraint values, in order
};

Decision decide(const std::vector<Function>& constraints, const Vector& x, double threshold,
                Aggregation mode, long k) {
  Decision d;
  d.values.reserve(constraints.size());
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    d.values.push_back(checked_value(constraints[i], x, k, "constraint"));
    if (mode == Aggregation::FirstViolated && d.values.back() > threshold) break;
  }
  d.switch_decision = select_constraint(d.values, threshold, mode);
  return d;
}

class SwitchingRun {
 public:
  SwitchingRun(const ProblemInstance& problem, const SolverConfig& config)
      : problem_(problem), config_(config) {
    config_.validate();
    if (problem_.constraints.empty()) throw std::invalid_argument("problem has no constraints");
    const auto& gt = problem_.ground_truth;
    if (!gt) return;
    std::optional<double> alpha = gt->sharpness_alpha;
    if (config_.algorithm != Algorithm::ConditionalSwitching && gt->eps_sharpness_alpha)
      alpha = gt->eps_sharpness_alpha(config_.epsilon);
    if (alpha) {
      params_ = ContractionParams{*alpha, problem_.lipschitz_f, problem_.lipschitz_g,
                                  config_.fbar.big_c};
      gamma_ = config_.gamma0;
    }
  }

  RunTrace run() {
    const Vector& start = config_.start ? *config_.start : problem_.default_start;
    if (start.size() != problem_.dimension)
      throw std::invalid_argument("start point has wrong dimension");
    Vector x = problem_.projector.project(start);
    const bool track_dist = problem_.ground_truth && problem_.ground_truth->has_distance();

    RunTrace trace;
    trace.records.reserve(static_cast<std::size_t>(std::min<long>(config_.max_iters, 1 << 20)));
    for (long k = 0; k < config_.max_iters; ++k) {
      const double fx = checked_value(problem_.objective, x, k, "objective");
      const double threshold = config_.algorithm == Algorithm::ConditionalSwitching
                                   ? fx - config_.fbar.f_bar
                                   : config_.epsilon;
      Decision d = decide(problem_.constraints, x, threshold, config_.aggregation, k);
      const SwitchDecision& s = d.switch_decision;
      trace.constraint_evaluations += s.evaluated;
      const bool all_evaluated = d.values.size() == problem_.constraints.size();

      std::optional<double> g_max;
      if (all_evaluated) g_max = s.aggregated_g;
      if (config_.early_stop && !g_max) g_max = complete_max(d.values, x, k);
      if (g_max) update_best(trace, fx, *g_max, x, k);
      if (config_.early_stop && fx - config_.fbar.f_bar <= 0.0 && *g_max <= config_.epsilon) {
        trace.terminated_early = true;
        trace.termination_reason = "f - f_bar <= 0 and g <= epsilon";
        break;
      }

      StepRecord rec;
      rec.iteration = k;
      rec.kind = s.kind;
      rec.f_value = fx;
      rec.g_value = s.aggregated_g;
      rec.gamma = gamma_;
      if (track_dist) rec.dist_to_solution = problem_.ground_truth->dist(x);
      if (config_.record_points) rec.point = x;

      Vector grad;
      double h = 0.0;
      try {
        if (s.kind == StepKind::Productive) {
          grad = checked_gradient(problem_.objective, x, k, "objective");
          rec.grad_norm = grad.norm();
          h = productive_step(fx, rec.grad_norm);
          trace.productive_set.push_back(k);
        } else {
          const int idx = *s.constraint_index;
          rec.constraint_index = idx;
          grad = checked_gradient(problem_.constraints[static_cast<std::size_t>(idx)], x, k,
                                  "constraint");
          rec.grad_norm = grad.norm();
          h = nonproductive_step(d.values[static_cast<std::size_t>(idx)], rec.grad_norm);
          trace.nonproductive_set.push_back(k);
        }
      } catch (const ZeroGradientError& e) {
        throw ZeroGradientError(e.what(), k);
      }
      rec.step_size = h;
      advance_gamma(s.kind, rec.grad_norm);
      trace.records.push_back(std::move(rec));
      if (h > 0.0) x = problem_.projector.project(x - h * grad);
    }

    trace.final_f = checked_value(problem_.objective, x, config_.max_iters, "objective");
    trace.final_g = problem_.max_constraint(x);
    if (track_dist) trace.final_dist = problem_.ground_truth->dist(x);
    if (!trace.terminated_early)
      update_best(trace, trace.final_f, trace.final_g, x, static_cast<long>(trace.records.size()));
    trace.final_point = std::move(x);
    return trace;
  }

 private:
  double productive_step(double fx, double grad_norm) const {
    const double tol = config_.grad_tolerance;
    if (config_.algorithm == Algorithm::BaselineSwitching)
      return baseline_objective_step(config_.epsilon, grad_norm, tol);
    return polyak_step(fx, config_.fbar.f_bar, problem_.lipschitz_f, grad_norm, tol);
  }

  double nonproductive_step(double g, double grad_norm) const {
    const double tol = config_.grad_tolerance;
    if (config_.algorithm == Algorithm::BaselineSwitching)
      return baseline_constraint_step(grad_norm, tol);
    return constraint_step(g, grad_norm, tol);
  }

  double complete_max(const std::vector<double>& seen, const Vector& x, long k) const {
    double g = -std::numeric_limits<double>::infinity();
    for (double v : seen) g = std::max(g, v);
    for (std::size_t i = seen.size(); i < problem_.constraints.size(); ++i)
      g = std::max(g, checked_value(problem_.constraints[i], x, k, "constraint"));
    return g;
  }

  void update_best(RunTrace& trace, double fx, double g, const Vector& x, long k) const {
    if (g > config_.epsilon) return;
    if (trace.best_f && fx >= *trace.best_f) return;
    trace.best_f = fx;
    trace.best_iteration = k;
    trace.best_point = x;
  }

  // gamma_k only tracks the analysis; once the trajectory leaves the range
  // where the recursion is defined it stops being reported.
  void advance_gamma(StepKind kind, double grad_norm) {
    if (!gamma_ || !params_) return;
    if (*gamma_ == 0.0) return;
    try {
      const std::optional<double> gn =
          kind == StepKind::Nonproductive ? std::optional<double>(grad_norm) : std::nullopt;
      gamma_ = config_.algorithm == Algorithm::ConditionalSwitching
                   ? gamma_update_cond(*gamma_, kind, *params_, gn)
                   : gamma_update_eps(*gamma_, kind, *params_, gn);
    } catch (const std::exception&) {
      gamma_.reset();
    }
  }

  const ProblemInstance& problem_;
  SolverConfig config_;
  std::optional<ContractionParams> params_;
  std::optional<double> gamma_;
};

RunTrace run_checked(const ProblemInstance& problem, const SolverConfig& config, Algorithm expected) {
  if (config.algorithm != expected)
    throw std::invalid_argument("solver called with config for algorithm '" +
                                to_string(config.algorithm) + "'");
  return SwitchingRun(problem, config).run();
}

}  // namespace

SwitchDecision select_constraint(std::span<const double> g_values, double threshold,
                                 Aggregation mode) {
  if (g_values.empty()) throw std::invalid_argument("select_constraint: no constraint values");
  SwitchDecision d;
  if (mode == Aggregation::FirstViolated) {
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g_values.size(); ++i) {
      d.evaluated = static_cast<int>(i) + 1;
      if (g_values[i] > threshold) {
        d.kind = StepKind::Nonproductive;
        d.constraint_index = static_cast<int>(i);
        d.aggregated_g = g_values[i];
        return d;
      }
      g_max = std::max(g_max, g_values[i]);
    }
    d.aggregated_g = g_max;
    return d;
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < g_values.size(); ++i)
    if (g_values[i] > g_values[arg]) arg = i;
  d.evaluated = static_cast<int>(g_values.size());
  d.aggregated_g = g_values[arg];
  if (d.aggregated_g > threshold) {
    d.kind = StepKind::Nonproductive;
    d.constraint_index = static_cast<int>(arg);
  }
  return d;
}

SwitchDecision select_constraint(const std::vector<Function>& constraints, const Vector& x,
                                 double threshold, Aggregation mode) {
  return decide(constraints, x, threshold, mode, 0).switch_decision;
}

RunTrace run_eps_switching(const ProblemInstance& problem, const SolverConfig& config) {
  return run_checked(problem, config, Algorithm::EpsSwitching);
}

RunTrace run_conditional_switching(const ProblemInstance& problem, const SolverConfig& config) {
  return run_checked(problem, config, Algorithm::ConditionalSwitching);
}

RunTrace run_baseline_switching(const ProblemInstance& problem, const SolverConfig& config) {
  return run_checked(problem, config, Algorithm::BaselineSwitching);
}

RunTrace run_solver(const ProblemInstance& problem, const SolverConfig& config) {
  return SwitchingRun(problem, config).run();
}

std::optional<long> first_eps_solution(const RunTrace& trace, double f_star, double epsilon) {
  for (const StepRecord& r : trace.records)
    if (r.f_value - f_star <= epsilon && r.g_value <= epsilon) return r.iteration;
  if (trace.final_f - f_star <= epsilon && trace.final_g <= epsilon)
    return static_cast<long>(trace.records.size());
  return std::nullopt;
}

}  // namespace sharp_subgrad
