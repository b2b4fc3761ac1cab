#include "sharp_subgrad/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sharp_subgrad {

double GroundTruth::dist(const Vector& x) const {
  if (distance) return distance(x);
  if (solutions.empty()) throw MissingGroundTruthError("instance has no solution set");
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& s : solutions) best = std::min(best, (x - s).norm());
  return best;
}

double ProblemInstance::max_constraint(const Vector& x) const {
  double g = -std::numeric_limits<double>::infinity();
  for (const Function& c : constraints) g = std::max(g, c.value(x));
  return g;
}

void FBarModel::validate() const {
  if (!(big_c > 0.0 && big_c <= 1.0)) throw std::invalid_argument("C must lie in (0, 1]");
  if (!std::isfinite(f_bar)) throw std::invalid_argument("f_bar must be finite");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::EpsSwitching: return "eps";
    case Algorithm::ConditionalSwitching: return "cond";
    case Algorithm::BaselineSwitching: return "baseline";
  }
  return "?";
}

std::string to_string(Aggregation aggregation) {
  return aggregation == Aggregation::MaxOfConstraints ? "max" : "first";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "eps" || name == "eps-switching") return Algorithm::EpsSwitching;
  if (name == "cond" || name == "conditional" || name == "conditional-switching")
    return Algorithm::ConditionalSwitching;
  if (name == "baseline" || name == "baseline-switching") return Algorithm::BaselineSwitching;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

Aggregation parse_aggregation(const std::string& name) {
  if (name == "max") return Aggregation::MaxOfConstraints;
  if (name == "first") return Aggregation::FirstViolated;
  throw std::invalid_argument("unknown aggregation '" + name + "'");
}

void SolverConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(gamma0 > 0.0 && gamma0 < 1.0)) throw std::invalid_argument("gamma0 must lie in (0, 1)");
  if (!(grad_tolerance >= 0.0)) throw std::invalid_argument("grad_tolerance must be nonnegative");
  fbar.validate();
}

double effective_c(double f_x, double f_bar, double f_star) {
  const double denom = f_x - f_star;
  if (std::abs(denom) < 1e-15 * std::max(1.0, std::abs(f_x)))
    throw DegenerateRatioError("iterate is at the optimal value; c(x) undefined");
  return (f_x - f_bar) / denom;
}

bool partition_is_consistent(const RunTrace& trace) {
  const auto k = static_cast<long>(trace.records.size());
  if (static_cast<long>(trace.productive_set.size() + trace.nonproductive_set.size()) != k)
    return false;
  std::vector<int> seen(static_cast<std::size_t>(k), 0);
  for (long i : trace.productive_set) {
    if (i < 0 || i >= k || seen[i]++ != 0) return false;
    if (trace.records[i].kind != StepKind::Productive) return false;
  }
  for (long i : trace.nonproductive_set) {
    if (i < 0 || i >= k || seen[i]++ != 0) return false;
    if (trace.records[i].kind != StepKind::Nonproductive) return false;
  }
  for (long i = 0; i < k; ++i)
    if (trace.records[i].iteration != i) return false;
  return true;
}

}  // namespace sharp_subgrad
