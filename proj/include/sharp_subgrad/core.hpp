// Domain types shared by the solvers, problem generators and checkers.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "sharp_subgrad/geometry.hpp"

namespace sharp_subgrad {

/// Base class for all numerical failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A subgradient with norm at or below the zero threshold was needed for a step.
/// Carries the iteration index when raised from inside a solver loop.
class ZeroGradientError : public Error {
 public:
  explicit ZeroGradientError(const std::string& what, std::optional<long> iteration = {})
      : Error(iteration ? what + " at iteration " + std::to_string(*iteration) : what),
        iteration_(iteration) {}
  std::optional<long> iteration() const { return iteration_; }

 private:
  std::optional<long> iteration_;
};

/// An oracle produced a NaN or infinite value or subgradient.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Parameters (alpha, M, C) are inconsistent with the trajectory: a contraction
/// factor or a gamma radicand left its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// effective_c was asked for at an iterate whose value equals f*.
class DegenerateRatioError : public Error {
 public:
  using Error::Error;
};

class MissingGroundTruthError : public Error {
 public:
  using Error::Error;
};

struct OracleOutput {
  double value = 0.0;
  Vector subgradient;
};

/// A function together with one (Clarke) subgradient selection. Both callables
/// must be pure: no hidden state, safe to call from several threads.
class Function {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  Function() = default;
  Function(ValueFn value, GradientFn gradient)
      : value_(std::move(value)), gradient_(std::move(gradient)) {}

  double value(const Vector& x) const { return value_(x); }
  Vector subgradient(const Vector& x) const { return gradient_(x); }
  OracleOutput operator()(const Vector& x) const { return {value_(x), gradient_(x)}; }

 private:
  ValueFn value_;
  GradientFn gradient_;
};

/// Known optimum of a problem instance, when one is available.
struct GroundTruth {
  double f_star = 0.0;
  /// Finite representation of X_*; may be empty when only a closed-form
  /// distance is known or when X_* itself is unknown.
  std::vector<Vector> solutions;
  /// Closed-form dist(x, X_*); takes precedence over `solutions`.
  std::function<double(const Vector&)> distance;
  /// alpha in max{f(x) - f*, g(x)} >= alpha * dist(x, X_*).
  std::optional<double> sharpness_alpha;
  /// alpha of the epsilon-dependent sharpness condition, as a function of epsilon.
  std::function<double(double)> eps_sharpness_alpha;

  bool has_distance() const { return static_cast<bool>(distance) || !solutions.empty(); }
  /// Distance to the solution set. Throws MissingGroundTruthError without X_*.
  double dist(const Vector& x) const;
};

struct ProblemInstance {
  std::string family;
  int dimension = 0;
  Function objective;
  std::vector<Function> constraints;
  Projector projector;
  double lipschitz_f = 1.0;
  std::optional<double> lipschitz_g;
  double weak_convexity_mu = 0.0;
  std::optional<GroundTruth> ground_truth;
  /// Start point used when the solver config does not override it.
  Vector default_start;
  /// Family, generator spec and coefficient arrays; enough to rebuild the instance.
  nlohmann::json artifact;

  /// max_i g_i(x)
  double max_constraint(const Vector& x) const;
};

/// Estimate f_bar of f*, tied to it through f(x) - f_bar = c(x) (f(x) - f*) with c(x) in [C, 2 - C].
struct FBarModel {
  double f_bar = 0.0;
  double big_c = 1.0;
  std::optional<double> f_star;

  /// Throws std::invalid_argument unless C is in (0, 1].
  void validate() const;
};

enum class Algorithm { EpsSwitching, ConditionalSwitching, BaselineSwitching };
enum class Aggregation { MaxOfConstraints, FirstViolated };
enum class StepKind { Productive, Nonproductive };

std::string to_string(Algorithm algorithm);
std::string to_string(Aggregation aggregation);
Algorithm parse_algorithm(const std::string& name);
Aggregation parse_aggregation(const std::string& name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::EpsSwitching;
  double epsilon = 1e-3;
  FBarModel fbar;
  double gamma0 = 0.5;
  long max_iters = 1000;
  Aggregation aggregation = Aggregation::MaxOfConstraints;
  double grad_tolerance = 1e-12;
  bool record_points = false;
  /// Stop once f(x_k) - f_bar <= 0 and g(x_k) <= epsilon.
  bool early_stop = false;
  std::uint64_t seed = 0;
  /// Overrides ProblemInstance::default_start; projected onto Q before use.
  std::optional<Vector> start;

  void validate() const;
};

struct StepRecord {
  long iteration = 0;
  StepKind kind = StepKind::Productive;
  double f_value = 0.0;
  /// Aggregated constraint value at x_k (see Aggregation).
  double g_value = 0.0;
  double step_size = 0.0;
  double grad_norm = 0.0;
  /// gamma_k; present only when the instance carries a sharpness constant.
  std::optional<double> gamma;
  std::optional<double> dist_to_solution;
  /// Which constraint drove a nonproductive step.
  std::optional<int> constraint_index;
  std::optional<Vector> point;
};

struct RunTrace {
  std::vector<StepRecord> records;
  std::vector<long> productive_set;
  std::vector<long> nonproductive_set;
  Vector final_point;
  double final_f = 0.0;
  double final_g = 0.0;
  std::optional<double> final_dist;
  /// Least f over iterates with max_i g_i <= epsilon.
  std::optional<double> best_f;
  std::optional<long> best_iteration;
  Vector best_point;
  bool terminated_early = false;
  std::string termination_reason;
  /// Constraint oracle values evaluated by the switching test.
  long constraint_evaluations = 0;

  std::size_t size() const { return records.size(); }
};

/// (f_x - f_bar) / (f_x - f_star). Throws DegenerateRatioError when
/// |f_x - f_star| < 1e-15 * max(1, |f_x|).
double effective_c(double f_x, double f_bar, double f_star);

/// True iff I and J partition {0, ..., K-1} and agree with the record kinds.
bool partition_is_consistent(const RunTrace& trace);

}  // namespace sharp_subgrad
