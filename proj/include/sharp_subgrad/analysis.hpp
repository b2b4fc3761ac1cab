// Post-hoc verification of convergence inequalities along recorded traces.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sharp_subgrad/core.hpp"
#include "sharp_subgrad/steps.hpp"

namespace sharp_subgrad {

struct ProjectionCheck {
  bool holds = true;
  /// ||x_next - x_ref||^2 - (||x - x_ref||^2 - 2h<grad, x - x_ref> + h^2 ||grad||^2)
  double residual = 0.0;
};

ProjectionCheck check_projection_inequality(const Vector& x, const Vector& x_next,
                                            const Vector& x_ref, double h, const Vector& grad,
                                            double tol);

enum class TheoremVariant { Theorem1, Theorem2 };

std::string to_string(TheoremVariant variant);

struct BoundSequence {
  /// bound[k] bounds dist^2(x_k, X_*); bound[0] = dist0_sq, size K + 1.
  std::vector<double> per_iteration_bound;
  /// Steps whose factor fell outside [0, 1] or lacked gamma / grad norm.
  std::vector<long> flagged;
  ContractionParams params;
  TheoremVariant variant = TheoremVariant::Theorem1;

  bool is_flagged(long step) const;
};

BoundSequence bound_sequence(const RunTrace& trace, const ContractionParams& params,
                             TheoremVariant variant, double dist0_sq);

struct TheoremFailure {
  long step = 0;  // the bound after this step was violated at x_{step+1}
  double residual = 0.0;
  std::string reason;
};

struct TheoremReport {
  bool passed = true;
  long checked = 0;
  long eps_solutions = 0;
  std::vector<TheoremFailure> failures;
  BoundSequence bounds;
};

/// For every k: (f(x_{k+1}) - f* <= eps and g(x_{k+1}) <= eps) or
/// dist^2(x_{k+1}, X_*) <= bound[k+1] + tol, using recorded values.
TheoremReport verify_theorem_alternative(const RunTrace& trace, const ProblemInstance& problem,
                                         const ContractionParams& params, double epsilon,
                                         TheoremVariant variant, double tol = 1e-9);

/// min over samples x in Q of max(f(x) - f*, g(x)) / dist(x, X_*).
double estimate_sharpness(const ProblemInstance& problem, long samples, std::uint64_t seed);

struct FBarWindowReport {
  /// effective c per iterate; empty where the iterate is optimal.
  std::vector<std::optional<double>> c_values;
  std::vector<long> compliant;
  std::vector<long> noncompliant;
  std::vector<long> degenerate;
  double compliant_fraction = 0.0;
};

FBarWindowReport check_fbar_window(const RunTrace& trace, const FBarModel& fbar);

nlohmann::json to_json(const ContractionParams& params);
nlohmann::json to_json(const TheoremReport& report);
nlohmann::json to_json(const FBarWindowReport& report);

}  // namespace sharp_subgrad
