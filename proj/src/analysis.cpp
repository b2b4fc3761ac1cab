#include "sharp_subgrad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sharp_subgrad/random.hpp"

namespace sharp_subgrad {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// A point of Q drawn from the seeded stream. Unbounded directions of a box are
// sampled within unit width of the finite bound.
Vector sample_in(const ProblemInstance& problem, RandomStream& rng) {
  const auto n = problem.dimension;
  return std::visit(
      Overloaded{[&](const WholeSpace&) -> Vector {
                   return problem.default_start + rng.in_ball(n, 1.0);
                 },
                 [&](const Ball& b) -> Vector { return b.center + rng.in_ball(n, b.radius); },
                 [&](const NonnegBall& s) -> Vector {
                   const Vector y = rng.in_ball(n, s.radius).cwiseAbs();
                   return problem.projector.project(y);
                 },
                 [&](const Box& b) -> Vector {
                   Vector x(n);
                   for (int i = 0; i < n; ++i) {
                     const double lo = b.lower[i];
                     const double hi = b.upper[i];
                     const double u = rng.uniform();
                     if (std::isfinite(lo) && std::isfinite(hi))
                       x[i] = lo + u * (hi - lo);
                     else if (std::isfinite(lo))
                       x[i] = lo + u;
                     else if (std::isfinite(hi))
                       x[i] = hi - u;
                     else
                       x[i] = 2.0 * u - 1.0;
                   }
                   return x;
                 }},
      problem.projector.kind());
}

}  // namespace

ProjectionCheck check_projection_inequality(const Vector& x, const Vector& x_next,
                                            const Vector& x_ref, double h, const Vector& grad,
                                            double tol) {
  const Vector d = x - x_ref;
  const double lhs = (x_next - x_ref).squaredNorm();
  const double rhs = d.squaredNorm() - 2.0 * h * grad.dot(d) + h * h * grad.squaredNorm();
  ProjectionCheck out;
  out.residual = lhs - rhs;
  out.holds = out.residual <= tol;
  return out;
}

std::string to_string(TheoremVariant variant) {
  return variant == TheoremVariant::Theorem1 ? "theorem1" : "theorem2";
}

bool BoundSequence::is_flagged(long step) const {
  return std::find(flagged.begin(), flagged.end(), step) != flagged.end();
}

BoundSequence bound_sequence(const RunTrace& trace, const ContractionParams& params,
                             TheoremVariant variant, double dist0_sq) {
  params.validate();
  BoundSequence out;
  out.params = params;
  out.variant = variant;
  out.per_iteration_bound.reserve(trace.records.size() + 1);
  out.per_iteration_bound.push_back(dist0_sq);

  // The productive factor does not depend on the step; a ParameterError means
  // every productive step is flagged.
  std::optional<double> productive;
  double productive_raw = 0.0;
  const double c = params.big_c;
  const double a2 = params.alpha * params.alpha;
  if (variant == TheoremVariant::Theorem1)
    productive_raw = 1.0 - a2 / (params.m_f * params.m_f) * (2.0 * c - c * c);
  else
    productive_raw = 1.0 - (c / (2.0 - c)) * a2 / (params.m_f * params.m_f);
  if (productive_raw >= 0.0 && productive_raw <= 1.0) productive = productive_raw;

  double bound = dist0_sq;
  for (const StepRecord& r : trace.records) {
    double factor = 1.0;
    bool flag = false;
    if (r.kind == StepKind::Productive) {
      if (productive)
        factor = *productive;
      else
        flag = true;
    } else if (!r.gamma || !(r.grad_norm > 0.0)) {
      flag = true;
    } else {
      factor = variant == TheoremVariant::Theorem1
                   ? nonproductive_factor_eps(params.alpha, *r.gamma, r.grad_norm)
                   : nonproductive_factor_cond(params.alpha, c, *r.gamma, r.grad_norm);
      if (!(factor >= 0.0 && factor <= 1.0)) flag = true;
    }
    if (flag) {
      out.flagged.push_back(r.iteration);
      factor = 1.0;
    }
    bound *= factor;
    out.per_iteration_bound.push_back(bound);
  }
  return out;
}

TheoremReport verify_theorem_alternative(const RunTrace& trace, const ProblemInstance& problem,
                                         const ContractionParams& params, double epsilon,
                                         TheoremVariant variant, double tol) {
  if (!problem.ground_truth || !problem.ground_truth->has_distance())
    throw MissingGroundTruthError("theorem check needs f* and the solution set");
  const double f_star = problem.ground_truth->f_star;

  // (f, g, dist) at x_0 .. x_K as recorded.
  struct State {
    double f, g;
    std::optional<double> dist;
  };
  std::vector<State> states;
  states.reserve(trace.records.size() + 1);
  for (const StepRecord& r : trace.records) states.push_back({r.f_value, r.g_value, r.dist_to_solution});
  if (trace.final_dist) states.push_back({trace.final_f, trace.final_g, trace.final_dist});
  if (states.empty() || !states.front().dist)
    throw MissingGroundTruthError("trace carries no distances to the solution set");

  TheoremReport report;
  const double d0 = *states.front().dist;
  report.bounds = bound_sequence(trace, params, variant, d0 * d0);
  const auto& bound = report.bounds.per_iteration_bound;

  for (std::size_t k = 0; k < states.size(); ++k) {
    const State& s = states[k];
    ++report.checked;
    if (k > 0 && report.bounds.is_flagged(static_cast<long>(k) - 1)) {
      report.failures.push_back({static_cast<long>(k) - 1, 0.0, "contraction factor outside [0, 1]"});
      continue;
    }
    if (s.f - f_star <= epsilon && s.g <= epsilon) {
      ++report.eps_solutions;
      continue;
    }
    if (!s.dist) {
      report.failures.push_back({static_cast<long>(k), 0.0, "missing distance"});
      continue;
    }
    const double residual = (*s.dist) * (*s.dist) - bound[k];
    if (residual > tol)
      report.failures.push_back({static_cast<long>(k) - 1, residual, "distance bound violated"});
  }
  report.passed = report.failures.empty();
  return report;
}

double estimate_sharpness(const ProblemInstance& problem, long samples, std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("estimate_sharpness: samples must be positive");
  if (!problem.ground_truth || !problem.ground_truth->has_distance())
    throw MissingGroundTruthError("sharpness estimate needs the solution set");
  const GroundTruth& gt = *problem.ground_truth;
  RandomStream rng(seed);
  double alpha = std::numeric_limits<double>::infinity();
  for (long i = 0; i < samples; ++i) {
    const Vector x = sample_in(problem, rng);
    const double d = gt.dist(x);
    if (!(d > 1e-12)) continue;
    const double excess = std::max(problem.objective.value(x) - gt.f_star, problem.max_constraint(x));
    alpha = std::min(alpha, excess / d);
  }
  return alpha;
}

FBarWindowReport check_fbar_window(const RunTrace& trace, const FBarModel& fbar) {
  if (!fbar.f_star) throw std::invalid_argument("check_fbar_window needs f* in the f_bar model");
  FBarWindowReport out;
  const double lo = fbar.big_c;
  const double hi = 2.0 - fbar.big_c;
  for (const StepRecord& r : trace.records) {
    try {
      const double c = effective_c(r.f_value, fbar.f_bar, *fbar.f_star);
      out.c_values.emplace_back(c);
      (c >= lo && c <= hi ? out.compliant : out.noncompliant).push_back(r.iteration);
    } catch (const DegenerateRatioError&) {
      out.c_values.emplace_back(std::nullopt);
      out.degenerate.push_back(r.iteration);
    }
  }
  const std::size_t rated = out.compliant.size() + out.noncompliant.size();
  out.compliant_fraction =
      rated == 0 ? 1.0 : static_cast<double>(out.compliant.size()) / static_cast<double>(rated);
  return out;
}

nlohmann::json to_json(const ContractionParams& p) {
  nlohmann::json j{{"alpha", p.alpha}, {"M_f", p.m_f}, {"C", p.big_c}};
  j["M_g"] = p.m_g ? nlohmann::json(*p.m_g) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const TheoremReport& r) {
  auto failures = nlohmann::json::array();
  for (const TheoremFailure& f : r.failures)
    failures.push_back({{"step", f.step}, {"residual", f.residual}, {"reason", f.reason}});
  return {{"variant", to_string(r.bounds.variant)},
          {"passed", r.passed},
          {"checked", r.checked},
          {"eps_solutions", r.eps_solutions},
          {"failures", failures},
          {"flagged", r.bounds.flagged},
          {"params", to_json(r.bounds.params)},
          {"bound", r.bounds.per_iteration_bound}};
}

nlohmann::json to_json(const FBarWindowReport& r) {
  auto c = nlohmann::json::array();
  for (const auto& v : r.c_values) c.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return {{"c", c},
          {"compliant", r.compliant},
          {"noncompliant", r.noncompliant},
          {"degenerate", r.degenerate},
          {"compliant_fraction", r.compliant_fraction}};
}

}  // namespace sharp_subgrad
