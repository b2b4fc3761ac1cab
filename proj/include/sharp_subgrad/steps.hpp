// Step-size rules, the v_f quantity, gamma recursions and contraction factors.
#pragma once

#include <optional>
#include <utility>

#include "sharp_subgrad/core.hpp"

namespace sharp_subgrad {

inline constexpr double kDefaultGradTolerance = 1e-12;

struct ContractionParams {
  double alpha = 1.0;
  double m_f = 1.0;
  std::optional<double> m_g;
  double big_c = 1.0;

  void validate() const;
};

enum class RateVariant { EpsProductive, CondProductive, UniformRemark };

/// <grad / ||grad||, x - y>, or 0 when ||grad|| <= tolerance.
double v_f(const Vector& grad_f, const Vector& x, const Vector& y,
           double grad_tolerance = kDefaultGradTolerance);

/// (f_x - f_bar) / (m_f * grad_norm). Returns 0 when f_x <= f_bar (the iterate
/// is already at the estimated level); otherwise throws ZeroGradientError if
/// grad_norm <= grad_tolerance.
double polyak_step(double f_x, double f_bar, double m_f, double grad_norm,
                   double grad_tolerance = kDefaultGradTolerance);

/// max(g_x, 0) / grad_norm^2. Throws ZeroGradientError for a violated
/// constraint whose subgradient vanishes.
double constraint_step(double g_x, double grad_norm,
                       double grad_tolerance = kDefaultGradTolerance);

/// Comparator steps: h_f = epsilon / ||grad f||^2, h_g = 1 / ||grad g||.
double baseline_objective_step(double epsilon, double grad_f_norm,
                               double grad_tolerance = kDefaultGradTolerance);
double baseline_constraint_step(double grad_g_norm, double grad_tolerance = kDefaultGradTolerance);
std::pair<double, double> baseline_steps(double epsilon, double grad_f_norm, double grad_g_norm,
                                         double grad_tolerance = kDefaultGradTolerance);

/// gamma recursion accompanying the epsilon-sharp switching scheme.
double gamma_update_eps(double gamma, StepKind kind, const ContractionParams& params,
                        std::optional<double> grad_g_norm = {});

/// gamma recursion accompanying the conditional-sharp switching scheme.
double gamma_update_cond(double gamma, StepKind kind, const ContractionParams& params,
                         std::optional<double> grad_g_norm = {});

/// Per-step squared-distance contraction factor.
///   EpsProductive:  1 - (alpha^2 / M_f^2) (2C - C^2)
///   CondProductive: 1 - (C / (2 - C)) alpha^2 / M_f^2
///   UniformRemark:  1 - C^2 alpha^2 / M^2 with M = max(M_f, M_g)
/// Throws ParameterError when the factor leaves [0, 1).
double contraction_factor(const ContractionParams& params, RateVariant variant);

/// Nonproductive-step factors: 1 - (1 - gamma) alpha^2 / ||grad g||^2, and
/// the same with an extra C^2 for the conditional scheme. Not range-checked.
double nonproductive_factor_eps(double alpha, double gamma, double grad_g_norm);
double nonproductive_factor_cond(double alpha, double big_c, double gamma, double grad_g_norm);

}  // namespace sharp_subgrad
