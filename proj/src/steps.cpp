#include "sharp_subgrad/steps.hpp"

#include <cmath>
#include <stdexcept>

namespace sharp_subgrad {
namespace {

double sq(double v) { return v * v; }

double shrink(double gamma, double radicand) {
  if (!(radicand >= 0.0))
    throw ParameterError("gamma update: nonpositive radicand " + std::to_string(radicand));
  return gamma * std::sqrt(radicand);
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
}

double require_grad_g(std::optional<double> grad_g_norm) {
  if (!grad_g_norm || !(*grad_g_norm > 0.0))
    throw std::invalid_argument("nonproductive gamma update needs a positive constraint gradient norm");
  return *grad_g_norm;
}

}  // namespace

void ContractionParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(m_f > 0.0)) throw std::invalid_argument("M_f must be positive");
  if (m_g && !(*m_g > 0.0)) throw std::invalid_argument("M_g must be positive");
  if (!(big_c > 0.0 && big_c <= 1.0)) throw std::invalid_argument("C must lie in (0, 1]");
}

double v_f(const Vector& grad_f, const Vector& x, const Vector& y, double grad_tolerance) {
  if (grad_f.size() != x.size() || x.size() != y.size())
    throw std::invalid_argument("v_f: dimension mismatch");
  const double norm = grad_f.norm();
  if (norm <= grad_tolerance) return 0.0;
  return grad_f.dot(x - y) / norm;
}

double polyak_step(double f_x, double f_bar, double m_f, double grad_norm, double grad_tolerance) {
  if (!(m_f > 0.0)) throw std::invalid_argument("polyak_step: M_f must be positive");
  const double numerator = f_x - f_bar;
  if (numerator <= 0.0) return 0.0;
  if (grad_norm <= grad_tolerance)
    throw ZeroGradientError("zero objective subgradient on a productive step");
  return numerator / (m_f * grad_norm);
}

double constraint_step(double g_x, double grad_norm, double grad_tolerance) {
  if (g_x <= 0.0) return 0.0;
  if (grad_norm <= grad_tolerance)
    throw ZeroGradientError("zero constraint subgradient on a nonproductive step");
  return g_x / sq(grad_norm);
}

double baseline_objective_step(double epsilon, double grad_f_norm, double grad_tolerance) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("baseline step: epsilon must be positive");
  if (grad_f_norm <= grad_tolerance)
    throw ZeroGradientError("zero objective subgradient on a productive step");
  return epsilon / sq(grad_f_norm);
}

double baseline_constraint_step(double grad_g_norm, double grad_tolerance) {
  if (grad_g_norm <= grad_tolerance)
    throw ZeroGradientError("zero constraint subgradient on a nonproductive step");
  return 1.0 / grad_g_norm;
}

std::pair<double, double> baseline_steps(double epsilon, double grad_f_norm, double grad_g_norm,
                                         double grad_tolerance) {
  return {baseline_objective_step(epsilon, grad_f_norm, grad_tolerance),
          baseline_constraint_step(grad_g_norm, grad_tolerance)};
}

double gamma_update_eps(double gamma, StepKind kind, const ContractionParams& params,
                        std::optional<double> grad_g_norm) {
  require_gamma(gamma);
  params.validate();
  if (kind == StepKind::Productive) {
    const double c = params.big_c;
    return shrink(gamma, 1.0 - sq(params.alpha / params.m_f) * (2.0 * c - c * c));
  }
  const double gn = require_grad_g(grad_g_norm);
  return shrink(gamma, 1.0 - sq(params.alpha) * (1.0 - gamma) / sq(gn));
}

double gamma_update_cond(double gamma, StepKind kind, const ContractionParams& params,
                         std::optional<double> grad_g_norm) {
  require_gamma(gamma);
  params.validate();
  const double c = params.big_c;
  if (kind == StepKind::Productive)
    return shrink(gamma, 1.0 - (c / (2.0 - c)) * sq(params.alpha / params.m_f));
  const double gn = require_grad_g(grad_g_norm);
  return shrink(gamma, 1.0 - (1.0 - gamma) * sq(c * params.alpha) / sq(gn));
}

double contraction_factor(const ContractionParams& params, RateVariant variant) {
  params.validate();
  const double c = params.big_c;
  double factor = 0.0;
  switch (variant) {
    case RateVariant::EpsProductive:
      factor = 1.0 - sq(params.alpha / params.m_f) * (2.0 * c - c * c);
      break;
    case RateVariant::CondProductive:
      factor = 1.0 - (c / (2.0 - c)) * sq(params.alpha / params.m_f);
      break;
    case RateVariant::UniformRemark: {
      if (!params.m_g) throw std::invalid_argument("uniform rate needs M_g");
      const double m = std::max(params.m_f, *params.m_g);
      factor = 1.0 - sq(c * params.alpha / m);
      break;
    }
  }
  if (!(factor >= 0.0 && factor < 1.0))
    throw ParameterError("contraction factor " + std::to_string(factor) + " outside [0, 1)");
  return factor;
}

double nonproductive_factor_eps(double alpha, double gamma, double grad_g_norm) {
  return 1.0 - (1.0 - gamma) * sq(alpha) / sq(grad_g_norm);
}

double nonproductive_factor_cond(double alpha, double big_c, double gamma, double grad_g_norm) {
  return 1.0 - (1.0 - gamma) * sq(big_c * alpha) / sq(grad_g_norm);
}

}  // namespace sharp_subgrad
