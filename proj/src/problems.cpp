#include "sharp_subgrad/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "sharp_subgrad/io.hpp"
#include "sharp_subgrad/random.hpp"
#include "sharp_subgrad/solvers.hpp"
#include "sharp_subgrad/steps.hpp"

namespace sharp_subgrad {
namespace {

constexpr double kMinExponentRow = 1e-6;
constexpr int kMaxRegenerations = 100;
// Truss instances up to this many coefficients get a reference f*.
constexpr long kDeskScaleCoefficients = 500000;

Vector uniform_start(int n, double sign = 1.0) {
  return Vector::Constant(n, sign / std::sqrt(static_cast<double>(n)));
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from_json(j[i]);
    if (row.size() != cols) throw std::invalid_argument("coefficient row has wrong length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

template <class T>
nlohmann::json optional_to_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Function linear_function(Vector row, double offset) {
  auto r = std::make_shared<const Vector>(std::move(row));
  return Function([r, offset](const Vector& x) { return r->dot(x) - offset; },
                  [r](const Vector&) { return *r; });
}

// ---------------------------------------------------------------- p-norm

double p_norm(const Vector& x, double p) {
  const double s = x.cwiseAbs().maxCoeff();
  if (s == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) / s, p);
  return s * std::pow(acc, 1.0 / p);
}

Vector p_norm_gradient(const Vector& x, double p) {
  Vector g = Vector::Zero(x.size());
  const double s = x.cwiseAbs().maxCoeff();
  if (s == 0.0) return g;
  const double scaled_norm = p_norm(x, p) / s;
  const double denom = std::pow(scaled_norm, p - 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    const double sign = x[i] > 0.0 ? 1.0 : -1.0;
    g[i] = sign * std::pow(std::abs(x[i]) / s, p - 1.0) / denom;
  }
  return g;
}

// ---------------------------------------------------------------- geometric

GeometricData make_geometric(const GeneratorSpec& spec) {
  RandomStream rng(spec.seed);
  GeometricData d;
  d.p = spec.p;
  d.radius = spec.radius;
  d.floor = spec.floor;
  d.coeff.resize(spec.m);
  d.exponents.resize(spec.m, spec.n);
  d.offset.resize(spec.m);
  for (int i = 0; i < spec.m; ++i) {
    double a = rng.uniform();
    while (a == 0.0) a = rng.uniform();
    d.coeff[i] = a;
    Vector row = rng.uniform_vector(spec.n);
    while (row.maxCoeff() < kMinExponentRow) row = rng.uniform_vector(spec.n);
    d.exponents.row(i) = row.transpose();
    // Offsets are normal draws restricted to positive values: a negative b_i
    // makes g_i >= -b_i > 0 on the whole orthant and the instance infeasible.
    double b = rng.normal();
    while (b <= 0.0) b = rng.normal();
    d.offset[i] = b;
  }
  return d;
}

ProblemInstance build_geometric(const GeometricData& data) {
  auto d = std::make_shared<const GeometricData>(data);
  const auto n = static_cast<int>(data.exponents.cols());
  ProblemInstance inst;
  inst.family = to_string(Family::GeometricProgram);
  inst.dimension = n;
  const double p = data.p;
  inst.objective = Function([p](const Vector& x) { return p_norm(x, p); },
                            [p](const Vector& x) { return p_norm_gradient(x, p); });
  for (Eigen::Index i = 0; i < data.exponents.rows(); ++i) {
    // a_i prod_j x_j^alpha_ij - b_i, evaluated in log space; requires x > 0.
    auto monomial = [d, i](const Vector& x) {
      if ((x.array() <= 0.0).any()) return std::numeric_limits<double>::quiet_NaN();
      return d->coeff[i] * std::exp(d->exponents.row(i).dot(x.array().log().matrix()));
    };
    inst.constraints.emplace_back(
        [d, i, monomial](const Vector& x) { return monomial(x) - d->offset[i]; },
        [d, i, monomial](const Vector& x) -> Vector {
          const double value = monomial(x);
          return (value * d->exponents.row(i).transpose().array() / x.array()).matrix();
        });
  }
  inst.projector = Projector::nonneg_ball(data.radius, data.floor);
  inst.lipschitz_f = p >= 2.0 ? 1.0 : std::pow(static_cast<double>(n), 1.0 / p - 0.5);
  GroundTruth gt;
  gt.f_star = 0.0;
  gt.distance = [](const Vector& x) { return x.norm(); };
  inst.ground_truth = gt;
  inst.default_start = uniform_start(n);
  return inst;
}

// ---------------------------------------------------------------- ratio

double ratio_value(const Vector& x, const Vector& b) { return x.norm() / (x - b).norm(); }

Vector ratio_gradient(const Vector& x, const Vector& b) {
  const double u = x.norm();
  if (u == 0.0) return b / b.squaredNorm();
  const Vector diff = x - b;
  const double w = diff.norm();
  return x / (u * w) - diff * (u / (w * w * w));
}

// sup of ||grad f|| over the ball of radius `radius`, where ||b|| = b_norm. The
// gradient norm depends on x only through (<x, b/||b||>, ||x_perp||), so the
// search runs over a half-disc.
double ratio_lipschitz(double radius, double b_norm) {
  auto grad_norm = [b_norm](double s, double t) {
    const double u = std::hypot(s, t);
    const double w = std::hypot(s - b_norm, t);
    const double gs = s / (u * w) - u * (s - b_norm) / (w * w * w);
    const double gt = t / (u * w) - u * t / (w * w * w);
    return std::hypot(gs, gt);
  };
  double sup = 1.0 / b_norm;  // norm of the subgradient chosen at the origin
  constexpr int kGrid = 400;
  for (int i = 0; i <= 2 * kGrid; ++i) {
    const double s = radius * (static_cast<double>(i) / kGrid - 1.0);
    for (int j = 0; j <= kGrid; ++j) {
      const double t = radius * static_cast<double>(j) / kGrid;
      if (s * s + t * t > radius * radius || (s == 0.0 && t == 0.0)) continue;
      sup = std::max(sup, grad_norm(s, t));
    }
  }
  constexpr int kArc = 4000;
  for (int i = 0; i <= kArc; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / kArc;
    sup = std::max(sup, grad_norm(radius * std::cos(theta), radius * std::sin(theta)));
  }
  return 1.1 * sup;
}

double norm_cone_value(const Vector& x, const Vector& dir, double offset) {
  const double u = x.norm();
  return u + std::max(-dir.dot(x), u) - offset;
}

Vector norm_cone_gradient(const Vector& x, const Vector& dir) {
  const double u = x.norm();
  Vector unit = u > 0.0 ? Vector(x / u) : Vector(Vector::Zero(x.size()));
  const double lin = -dir.dot(x);
  return unit + (lin >= u ? Vector(-dir) : unit);
}

RatioData make_ratio(const GeneratorSpec& spec) {
  for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
    RandomStream rng(spec.seed, static_cast<std::uint32_t>(attempt));
    RatioData d;
    d.variant = spec.variant;
    d.radius = spec.radius;
    d.b = 2.0 * rng.unit_vector(spec.n);
    double g_origin = 0.0;
    if (spec.variant == RatioVariant::NormCone) {
      d.cone_dir = rng.uniform_vector(spec.n);
      d.cone_offset = rng.uniform();
      g_origin = -d.cone_offset;
    } else {
      d.rows.resize(spec.m, spec.n);
      for (int i = 0; i < spec.m; ++i) d.rows.row(i) = rng.uniform_vector(spec.n).transpose();
      d.offsets = rng.uniform_vector(spec.m);
      g_origin = (-d.offsets).maxCoeff();
    }
    if (g_origin > 0.0) continue;  // origin infeasible: next substream
    d.lipschitz_f = ratio_lipschitz(d.radius, d.b.norm());
    return d;
  }
  throw Error("ratio generator: no instance with a feasible origin");
}

ProblemInstance build_ratio(const RatioData& data) {
  auto d = std::make_shared<const RatioData>(data);
  const auto n = static_cast<int>(data.b.size());
  ProblemInstance inst;
  inst.family = to_string(Family::RatioDistances);
  inst.dimension = n;
  inst.objective = Function([d](const Vector& x) { return ratio_value(x, d->b); },
                            [d](const Vector& x) { return ratio_gradient(x, d->b); });
  double m_g = 0.0;
  if (data.variant == RatioVariant::NormCone) {
    inst.constraints.emplace_back(
        [d](const Vector& x) { return norm_cone_value(x, d->cone_dir, d->cone_offset); },
        [d](const Vector& x) { return norm_cone_gradient(x, d->cone_dir); });
    m_g = 1.0 + std::max(1.0, data.cone_dir.norm());
  } else {
    for (Eigen::Index i = 0; i < data.rows.rows(); ++i) {
      inst.constraints.push_back(linear_function(data.rows.row(i).transpose(), data.offsets[i]));
      m_g = std::max(m_g, data.rows.row(i).norm());
    }
  }
  inst.projector = Projector::ball(Vector::Zero(n), data.radius);
  inst.lipschitz_f = data.lipschitz_f;
  if (m_g > 0.0) inst.lipschitz_g = m_g;
  GroundTruth gt;
  gt.f_star = 0.0;
  gt.solutions = {Vector::Zero(n)};
  gt.distance = [](const Vector& x) { return x.norm(); };
  // ||x - b|| <= radius + ||b|| on Q, hence f(x) >= ||x|| / (radius + ||b||).
  gt.sharpness_alpha = 1.0 / (data.radius + data.b.norm());
  inst.ground_truth = gt;
  inst.default_start = uniform_start(n, data.variant == RatioVariant::LinearMax ? -1.0 : 1.0);
  return inst;
}

// ---------------------------------------------------------------- truss

ProblemInstance build_truss(const TrussData& data) {
  const auto n = static_cast<int>(data.weights.size());
  const auto m = data.rows.rows();
  ProblemInstance inst;
  inst.family = to_string(Family::TrussDesign);
  inst.dimension = n;
  auto w = std::make_shared<const Vector>(data.weights);
  inst.objective = Function([w](const Vector& x) { return -w->dot(x); },
                            [w](const Vector&) -> Vector { return -*w; });
  double m_g = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    inst.constraints.push_back(linear_function(data.rows.row(i).transpose(), 1.0));
    m_g = std::max(m_g, data.rows.row(i).norm());
  }
  for (Eigen::Index i = 0; i < m; ++i)
    inst.constraints.push_back(linear_function(-data.rows.row(i).transpose(), 1.0));
  inst.projector = Projector::ball(Vector::Zero(n), data.radius);
  const double wn = data.weights.norm();
  inst.lipschitz_f = wn > 0.0 ? wn : 1.0;
  if (m_g > 0.0) inst.lipschitz_g = m_g;
  if (data.f_star) {
    GroundTruth gt;
    gt.f_star = *data.f_star;
    inst.ground_truth = gt;
  }
  inst.default_start = uniform_start(n);
  return inst;
}

TrussData make_truss(const GeneratorSpec& spec) {
  RandomStream rng(spec.seed);
  TrussData d;
  d.radius = spec.radius;
  d.weights = rng.uniform_vector(spec.n);
  d.rows.resize(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) d.rows.row(i) = rng.normal_vector(spec.n, spec.noise_sigma).transpose();
  if (static_cast<long>(spec.n) * spec.m <= kDeskScaleCoefficients) {
    const TrussOptimum opt = truss_reference_optimum(d.weights, d.rows, d.radius);
    d.f_star = opt.f_star;
    d.f_star_gap = opt.gap;
  }
  return d;
}

// ---------------------------------------------------------------- KL

double kl_sum_at(const Vector& a, double lambda) {
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const long double t = static_cast<long double>(a[i]) / lambda;
    acc += static_cast<long double>(a[i]) * ((t - 1.0L) * std::exp(t) + 1.0L);
  }
  return static_cast<double>(acc);
}

ProblemInstance build_kl(const KlData& data) {
  auto d = std::make_shared<const KlData>(data);
  const auto n = static_cast<int>(data.a.size());
  ProblemInstance inst;
  inst.family = to_string(Family::KlConstrained);
  inst.dimension = n;
  inst.objective = Function(
      [d](const Vector& x) { return -std::sqrt(d->a.dot(x)); },
      [d](const Vector& x) -> Vector { return -d->a / (2.0 * std::sqrt(d->a.dot(x))); });
  inst.constraints.emplace_back(
      [d](const Vector& x) {
        if ((x.array() <= 0.0).any()) return std::numeric_limits<double>::quiet_NaN();
        return generalized_kl(x, d->a) - d->budget;
      },
      [d](const Vector& x) -> Vector { return (x.array() / d->a.array()).log().matrix(); });
  inst.projector = Projector::box(Vector::Constant(n, data.floor),
                                  Vector::Constant(n, std::numeric_limits<double>::infinity()));
  inst.default_start = uniform_start(n);
  // Gradient norm at the default start; it bounds ||grad f|| on the region
  // {a^T x >= a^T x0} that descent on f stays in.
  inst.lipschitz_f = data.a.norm() / (2.0 * std::sqrt(data.a.dot(inst.default_start)));
  if (data.f_star) {
    GroundTruth gt;
    gt.f_star = *data.f_star;
    if (data.x_star) gt.solutions = {*data.x_star};
    inst.ground_truth = gt;
  }
  return inst;
}

KlData make_kl(const GeneratorSpec& spec) {
  RandomStream rng(spec.seed);
  KlData d;
  d.budget = spec.budget;
  d.floor = spec.floor;
  d.a.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) d.a[i] = rng.uniform_open_closed();
  const KlOptimum opt = kl_reference_optimum(d.a, d.budget);
  d.f_star = opt.f_star;
  d.x_star = opt.x_star;
  d.lambda_star = opt.lambda_star;
  return d;
}

// ---------------------------------------------------------------- synthetic

constexpr double kSyntheticScale = 2.0;
constexpr double kSyntheticSlack = 1e-3;

// c * max_j |(R (x - x_star))_j| - s with R = I - 2 v v^T.
double box_value(const SyntheticData& d, const Vector& x) {
  const Vector diff = x - d.x_star;
  const Vector rotated = diff - 2.0 * d.rotation * d.rotation.dot(diff);
  return d.scale * rotated.cwiseAbs().maxCoeff() - d.slack;
}

Vector box_gradient(const SyntheticData& d, const Vector& x) {
  const Vector diff = x - d.x_star;
  const Vector rotated = diff - 2.0 * d.rotation * d.rotation.dot(diff);
  Eigen::Index j = 0;
  rotated.cwiseAbs().maxCoeff(&j);
  const double sign = rotated[j] < 0.0 ? -1.0 : 1.0;
  Vector row = -2.0 * d.rotation[j] * d.rotation;
  row[j] += 1.0;
  return d.scale * sign * row;
}

ProblemInstance build_synthetic(const SyntheticData& data) {
  auto d = std::make_shared<const SyntheticData>(data);
  const auto n = static_cast<int>(data.x_star.size());
  ProblemInstance inst;
  inst.family = to_string(Family::SyntheticSharp);
  inst.dimension = n;
  inst.objective = Function(
      [d](const Vector& x) { return (x - d->x_star).norm(); },
      [d](const Vector& x) -> Vector {
        const Vector diff = x - d->x_star;
        const double norm = diff.norm();
        return norm > 0.0 ? Vector(diff / norm) : Vector(Vector::Zero(diff.size()));
      });
  inst.constraints.emplace_back([d](const Vector& x) { return box_value(*d, x); },
                                [d](const Vector& x) { return box_gradient(*d, x); });
  for (Eigen::Index i = 0; i < data.rows.rows(); ++i)
    inst.constraints.push_back(linear_function(data.rows.row(i).transpose(), data.offsets[i]));
  inst.projector = Projector::ball(Vector::Zero(n), data.radius);
  inst.lipschitz_f = 1.0;
  inst.lipschitz_g = data.scale;
  GroundTruth gt;
  gt.f_star = 0.0;
  gt.solutions = {data.x_star};
  gt.distance = [d](const Vector& x) { return (x - d->x_star).norm(); };
  gt.sharpness_alpha = 1.0;
  // g >= max(eps, beta * dist - s) whenever g > eps, with beta = c / sqrt(n)
  // from ||R d||_inf >= ||d|| / sqrt(n).
  const double beta = data.scale / std::sqrt(static_cast<double>(n));
  const double slack = data.slack;
  gt.eps_sharpness_alpha = [beta, slack](double eps) {
    return std::min(1.0, beta * eps / (eps + slack));
  };
  inst.ground_truth = gt;
  inst.default_start = uniform_start(n);
  return inst;
}

SyntheticData make_synthetic(const GeneratorSpec& spec) {
  RandomStream rng(spec.seed);
  SyntheticData d;
  const Vector start = Projector::ball(Vector::Zero(spec.n), spec.radius).project(uniform_start(spec.n));
  for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
    d = SyntheticData{};
    d.radius = spec.radius;
    d.scale = kSyntheticScale;
    d.slack = kSyntheticSlack;
    d.x_star = rng.in_ball(spec.n, 0.5 * spec.radius);
    d.rotation = rng.unit_vector(spec.n);
    d.rows.resize(spec.m, spec.n);
    d.offsets.resize(spec.m);
    for (int i = 0; i < spec.m; ++i) {
      const Vector row = rng.unit_vector(spec.n) * (d.scale * rng.uniform(0.5, 1.0));
      d.rows.row(i) = row.transpose();
      d.offsets[i] = row.dot(d.x_star) + d.slack + rng.uniform();
    }
    // The default start must violate the box constraint so runs exercise
    // nonproductive steps.
    if (box_value(d, start) > 0.0) break;
  }
  return d;
}

// ---------------------------------------------------------------- json

nlohmann::json data_to_json(const InstanceData& data) {
  return std::visit(
      [](const auto& d) -> nlohmann::json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GeometricData>) {
          return {{"p", d.p},           {"coeff", vector_to_json(d.coeff)},
                  {"exponents", matrix_to_json(d.exponents)},
                  {"offset", vector_to_json(d.offset)}, {"radius", d.radius}, {"floor", d.floor}};
        } else if constexpr (std::is_same_v<T, RatioData>) {
          nlohmann::json j{{"variant", to_string(d.variant)},
                           {"b", vector_to_json(d.b)},
                           {"radius", d.radius},
                           {"lipschitz_f", d.lipschitz_f}};
          if (d.variant == RatioVariant::NormCone) {
            j["cone_dir"] = vector_to_json(d.cone_dir);
            j["cone_offset"] = d.cone_offset;
          } else {
            j["rows"] = matrix_to_json(d.rows);
            j["offsets"] = vector_to_json(d.offsets);
          }
          return j;
        } else if constexpr (std::is_same_v<T, TrussData>) {
          return {{"weights", vector_to_json(d.weights)},
                  {"rows", matrix_to_json(d.rows)},
                  {"radius", d.radius},
                  {"f_star", optional_to_json(d.f_star)},
                  {"f_star_gap", optional_to_json(d.f_star_gap)}};
        } else if constexpr (std::is_same_v<T, KlData>) {
          return {{"a", vector_to_json(d.a)},
                  {"budget", d.budget},
                  {"floor", d.floor},
                  {"f_star", optional_to_json(d.f_star)},
                  {"x_star", d.x_star ? vector_to_json(*d.x_star) : nlohmann::json(nullptr)},
                  {"lambda_star", optional_to_json(d.lambda_star)}};
        } else {
          return {{"x_star", vector_to_json(d.x_star)},
                  {"rotation", vector_to_json(d.rotation)},
                  {"scale", d.scale},
                  {"slack", d.slack},
                  {"rows", matrix_to_json(d.rows)},
                  {"offsets", vector_to_json(d.offsets)},
                  {"radius", d.radius}};
        }
      },
      data);
}

InstanceData data_from_json(Family family, const nlohmann::json& j) {
  switch (family) {
    case Family::GeometricProgram: {
      GeometricData d;
      d.p = j.at("p").get<double>();
      d.coeff = vector_from_json(j.at("coeff"));
      d.offset = vector_from_json(j.at("offset"));
      const auto& rows = j.at("exponents");
      const Eigen::Index n = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size());
      d.exponents = matrix_from_json(rows, n);
      d.radius = j.at("radius").get<double>();
      d.floor = j.at("floor").get<double>();
      return d;
    }
    case Family::RatioDistances: {
      RatioData d;
      d.variant = parse_ratio_variant(j.at("variant").get<std::string>());
      d.b = vector_from_json(j.at("b"));
      d.radius = j.at("radius").get<double>();
      d.lipschitz_f = j.at("lipschitz_f").get<double>();
      if (d.variant == RatioVariant::NormCone) {
        d.cone_dir = vector_from_json(j.at("cone_dir"));
        d.cone_offset = j.at("cone_offset").get<double>();
      } else {
        d.rows = matrix_from_json(j.at("rows"), d.b.size());
        d.offsets = vector_from_json(j.at("offsets"));
      }
      return d;
    }
    case Family::TrussDesign: {
      TrussData d;
      d.weights = vector_from_json(j.at("weights"));
      d.rows = matrix_from_json(j.at("rows"), d.weights.size());
      d.radius = j.at("radius").get<double>();
      d.f_star = optional_double(j, "f_star");
      d.f_star_gap = optional_double(j, "f_star_gap");
      return d;
    }
    case Family::KlConstrained: {
      KlData d;
      d.a = vector_from_json(j.at("a"));
      d.budget = j.at("budget").get<double>();
      d.floor = j.at("floor").get<double>();
      d.f_star = optional_double(j, "f_star");
      if (j.contains("x_star") && !j.at("x_star").is_null()) d.x_star = vector_from_json(j.at("x_star"));
      d.lambda_star = optional_double(j, "lambda_star");
      return d;
    }
    case Family::SyntheticSharp: {
      SyntheticData d;
      d.x_star = vector_from_json(j.at("x_star"));
      d.rotation = vector_from_json(j.at("rotation"));
      d.scale = j.at("scale").get<double>();
      d.slack = j.at("slack").get<double>();
      d.rows = matrix_from_json(j.at("rows"), d.x_star.size());
      d.offsets = vector_from_json(j.at("offsets"));
      d.radius = j.at("radius").get<double>();
      return d;
    }
  }
  throw std::invalid_argument("unknown family");
}

Family family_of(const InstanceData& data) {
  return static_cast<Family>(data.index());
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::GeometricProgram: return "geometric";
    case Family::RatioDistances: return "ratio";
    case Family::TrussDesign: return "truss";
    case Family::KlConstrained: return "kl";
    case Family::SyntheticSharp: return "synthetic-sharp";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "geometric") return Family::GeometricProgram;
  if (name == "ratio") return Family::RatioDistances;
  if (name == "truss") return Family::TrussDesign;
  if (name == "kl") return Family::KlConstrained;
  if (name == "synthetic-sharp" || name == "synthetic") return Family::SyntheticSharp;
  throw std::invalid_argument("unknown family '" + name + "'");
}

std::string to_string(RatioVariant variant) {
  return variant == RatioVariant::NormCone ? "norm-cone" : "linear-max";
}

RatioVariant parse_ratio_variant(const std::string& name) {
  if (name == "norm-cone") return RatioVariant::NormCone;
  if (name == "linear-max") return RatioVariant::LinearMax;
  throw std::invalid_argument("unknown ratio variant '" + name + "'");
}

void GeneratorSpec::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const bool uses_m = family == Family::GeometricProgram || family == Family::TrussDesign ||
                      family == Family::SyntheticSharp ||
                      (family == Family::RatioDistances && variant == RatioVariant::LinearMax);
  if (uses_m && m < 1) throw std::invalid_argument("m must be at least 1");
  if (m < 0) throw std::invalid_argument("m must be nonnegative");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(floor >= 0.0)) throw std::invalid_argument("floor must be nonnegative");
  if (family == Family::TrussDesign && !(noise_sigma > 0.0))
    throw std::invalid_argument("noise sigma must be positive");
  if (family == Family::KlConstrained && !(budget > 0.0))
    throw std::invalid_argument("KL budget must be positive");
  if (family == Family::RatioDistances && !(radius < 2.0))
    throw std::invalid_argument("ratio family needs radius < ||b|| = 2");
  if (family == Family::GeometricProgram &&
      !(floor * std::sqrt(static_cast<double>(n)) < radius))
    throw std::invalid_argument("floor * sqrt(n) must be below the radius");
}

nlohmann::json to_json(const GeneratorSpec& spec) {
  return {{"family", to_string(spec.family)}, {"variant", to_string(spec.variant)},
          {"n", spec.n},                      {"m", spec.m},
          {"p", spec.p},                      {"radius", spec.radius},
          {"sigma", spec.noise_sigma},        {"budget", spec.budget},
          {"floor", spec.floor},              {"seed", spec.seed}};
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
  GeneratorSpec s;
  if (j.contains("family")) s.family = parse_family(j.at("family").get<std::string>());
  if (j.contains("variant")) s.variant = parse_ratio_variant(j.at("variant").get<std::string>());
  if (j.contains("n")) s.n = j.at("n").get<int>();
  if (j.contains("m")) s.m = j.at("m").get<int>();
  if (j.contains("p")) s.p = j.at("p").get<double>();
  if (j.contains("radius")) s.radius = j.at("radius").get<double>();
  if (j.contains("sigma")) s.noise_sigma = j.at("sigma").get<double>();
  if (j.contains("budget")) s.budget = j.at("budget").get<double>();
  if (j.contains("floor")) s.floor = j.at("floor").get<double>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

InstanceData generate_data(const GeneratorSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::GeometricProgram: return make_geometric(spec);
    case Family::RatioDistances: return make_ratio(spec);
    case Family::TrussDesign: return make_truss(spec);
    case Family::KlConstrained: return make_kl(spec);
    case Family::SyntheticSharp: return make_synthetic(spec);
  }
  throw std::invalid_argument("unknown family");
}

ProblemInstance build_instance(const InstanceData& data, const GeneratorSpec& spec) {
  ProblemInstance inst = std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GeometricData>) return build_geometric(d);
        else if constexpr (std::is_same_v<T, RatioData>) return build_ratio(d);
        else if constexpr (std::is_same_v<T, TrussData>) return build_truss(d);
        else if constexpr (std::is_same_v<T, KlData>) return build_kl(d);
        else return build_synthetic(d);
      },
      data);
  GeneratorSpec recorded = spec;
  recorded.family = family_of(data);
  inst.artifact = {{"family", to_string(recorded.family)},
                   {"spec", to_json(recorded)},
                   {"data", data_to_json(data)}};
  return inst;
}

ProblemInstance generate(const GeneratorSpec& spec) { return build_instance(generate_data(spec), spec); }

namespace {
ProblemInstance generate_checked(const GeneratorSpec& spec, Family expected) {
  if (spec.family != expected)
    throw std::invalid_argument("generator called with spec for family '" + to_string(spec.family) + "'");
  return generate(spec);
}
}  // namespace

ProblemInstance gen_geometric_program(const GeneratorSpec& spec) {
  return generate_checked(spec, Family::GeometricProgram);
}
ProblemInstance gen_ratio_problem(const GeneratorSpec& spec) {
  return generate_checked(spec, Family::RatioDistances);
}
ProblemInstance gen_truss_problem(const GeneratorSpec& spec) {
  return generate_checked(spec, Family::TrussDesign);
}
ProblemInstance gen_kl_problem(const GeneratorSpec& spec) {
  return generate_checked(spec, Family::KlConstrained);
}
ProblemInstance gen_synthetic_sharp(const GeneratorSpec& spec) {
  return generate_checked(spec, Family::SyntheticSharp);
}

nlohmann::json instance_to_json(const ProblemInstance& problem) { return problem.artifact; }

ProblemInstance instance_from_json(const nlohmann::json& j) {
  const Family family = parse_family(j.at("family").get<std::string>());
  GeneratorSpec spec = generator_spec_from_json(j.at("spec"));
  spec.family = family;
  return build_instance(data_from_json(family, j.at("data")), spec);
}

double generalized_kl(const Vector& x, const Vector& a) {
  if (x.size() != a.size()) throw std::invalid_argument("generalized_kl: dimension mismatch");
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const long double xi = x[i];
    const long double ai = a[i];
    acc += xi * std::log(xi / ai) - xi + ai;
  }
  return static_cast<double>(acc);
}

KlOptimum kl_reference_optimum(const Vector& a, double budget, double tol) {
  if (a.size() == 0 || !(a.array() > 0.0).all())
    throw std::invalid_argument("kl_reference_optimum: a must be strictly positive");
  if (!(budget > 0.0)) throw std::invalid_argument("kl_reference_optimum: budget must be positive");

  // KL(x(lambda), a) decreases from +inf to 0 as lambda grows.
  auto excess = [&](double lambda) { return kl_sum_at(a, lambda) - budget; };
  double lo = 1.0;
  double hi = 1.0;
  int expansions = 0;
  while (!(excess(hi) < 0.0)) {
    hi *= 2.0;
    if (++expansions > 2000) throw BracketError("KL bisection: no upper bracket for lambda");
  }
  expansions = 0;
  while (!(excess(lo) > 0.0)) {
    lo *= 0.5;
    if (++expansions > 2000) throw BracketError("KL bisection: no lower bracket for lambda");
  }

  KlOptimum out;
  double lambda = 0.5 * (lo + hi);
  for (int step = 0; step < 2000; ++step) {
    lambda = 0.5 * (lo + hi);
    if (!(lo < lambda && lambda < hi)) {
      lambda = std::abs(excess(lo)) < std::abs(excess(hi)) ? lo : hi;
      break;
    }
    out.bisection_steps = step + 1;
    const double e = excess(lambda);
    if (std::abs(e) <= tol) break;
    if (e > 0.0)
      lo = lambda;
    else
      hi = lambda;
  }

  out.lambda_star = lambda;
  out.x_star = (a.array() * (a.array() / lambda).exp()).matrix();
  out.f_star = -std::sqrt(a.dot(out.x_star));
  out.kl_residual = std::abs(generalized_kl(out.x_star, a) - budget);
  out.stationarity_residual =
      (a.array() - lambda * (out.x_star.array() / a.array()).log()).abs().maxCoeff();
  return out;
}

TrussOptimum truss_reference_optimum(const Vector& weights, const Matrix& rows, double radius,
                                     long max_iters, double tol) {
  if (rows.cols() != weights.size()) throw std::invalid_argument("truss reference: dimension mismatch");
  if (!(radius > 0.0)) throw std::invalid_argument("truss reference: radius must be positive");
  const Eigen::Index m = rows.rows();

  auto residual = [&](const Vector& y) -> Vector { return weights - rows.transpose() * y; };
  auto smooth = [&](const Vector& y) { return radius * residual(y).norm(); };
  auto dual = [&](const Vector& y) { return y.lpNorm<1>() + smooth(y); };
  auto soft = [](const Vector& v, double t) -> Vector {
    return v.unaryExpr([t](double e) { return e > t ? e - t : (e < -t ? e + t : 0.0); });
  };

  TrussOptimum out;
  out.f_star = 0.0;
  out.x_feasible = Vector::Zero(weights.size());
  auto recover = [&](const Vector& y) {
    const Vector w = residual(y);
    const double norm = w.norm();
    if (norm == 0.0) return;
    Vector x = w * (radius / norm);
    const double worst = m > 0 ? (rows * x).cwiseAbs().maxCoeff() : 0.0;
    if (worst > 1.0) x /= worst;
    const double f = -weights.dot(x);
    if (f < out.f_star) {
      out.f_star = f;
      out.x_feasible = x;
    }
  };

  // Closed-form optimum on the active set suggested by the sign pattern of y:
  // A_S x = sign(y_S), ||x|| = r. Exact multipliers give a dual value to compare.
  double certified_dual = std::numeric_limits<double>::infinity();
  auto polish_support = [&](const Vector& y, double cutoff) {
    std::vector<Eigen::Index> support;
    const double scale = y.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m; ++i)
      if (std::abs(y[i]) > cutoff * scale) support.push_back(i);
    const auto k = static_cast<Eigen::Index>(support.size());
    if (k == 0 || k >= weights.size()) return;
    Matrix as(k, weights.size());
    Vector sign(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      as.row(i) = rows.row(support[static_cast<std::size_t>(i)]);
      sign[i] = y[support[static_cast<std::size_t>(i)]] > 0.0 ? 1.0 : -1.0;
    }
    const Eigen::LDLT<Matrix> gram(as * as.transpose());
    if (gram.info() != Eigen::Success) return;
    const Vector x0 = as.transpose() * gram.solve(sign);
    const Vector pw = weights - as.transpose() * gram.solve(as * weights);
    const double slack = radius * radius - x0.squaredNorm();
    if (!(slack > 0.0) || pw.norm() == 0.0) return;
    Vector x = x0 + pw * (std::sqrt(slack) / pw.norm());
    const double worst = (rows * x).cwiseAbs().maxCoeff();
    if (worst > 1.0) x /= worst;
    if (x.norm() > radius) x *= radius / x.norm();
    const double f = -weights.dot(x);
    if (f < out.f_star) {
      out.f_star = f;
      out.x_feasible = x;
    }
    const double mu = pw.norm() / std::sqrt(slack);
    const Vector ys = gram.solve(as * (weights - mu * x));
    bool signs_ok = true;
    Vector y_full = Vector::Zero(m);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (ys[i] * sign[i] < 0.0) signs_ok = false;
      y_full[support[static_cast<std::size_t>(i)]] = ys[i];
    }
    if (signs_ok) certified_dual = std::min(certified_dual, dual(y_full));
  };
  auto polish = [&](const Vector& y) {
    for (double cutoff : {1e-9, 1e-6, 1e-4, 1e-2}) polish_support(y, cutoff);
  };

  Vector y = Vector::Zero(m);
  Vector z = y;
  double t = 1.0;
  double lip = radius * rows.squaredNorm() / std::max(weights.norm(), 1e-300);
  double best = dual(y);
  Vector best_y = y;
  double previous = best;
  recover(y);
  long k = 0;
  bool restarted = false;
  for (; k < max_iters; ++k) {
    if (k % 50 == 0) {
      recover(best_y);
      polish(best_y);
      const double upper = std::min(best, certified_dual);
      if (upper + out.f_star <= tol * std::max(1.0, upper)) break;
    }
    const Vector wz = residual(z);
    const double wz_norm = wz.norm();
    if (wz_norm == 0.0) break;
    const Vector grad = -radius * (rows * wz) / wz_norm;
    const double hz = radius * wz_norm;
    Vector y_next;
    for (int tries = 0; tries < 60; ++tries) {
      y_next = soft(z - grad / lip, 1.0 / lip);
      const Vector step = y_next - z;
      if (smooth(y_next) <= hz + grad.dot(step) + 0.5 * lip * step.squaredNorm() + 1e-15 * hz) break;
      lip *= 2.0;
    }
    const double value = dual(y_next);
    if (value < best) {
      best = value;
      best_y = y_next;
    }
    if (value > previous) {
      if (restarted) break;  // no descent even without momentum: stagnated
      t = 1.0;
      z = y;
      restarted = true;
      continue;
    }
    restarted = false;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = y_next + ((t - 1.0) / t_next) * (y_next - y);
    y = y_next;
    t = t_next;
    previous = value;
    lip *= 0.95;
  }
  polish(best_y);
  recover(best_y);
  out.dual_value = std::min(best, certified_dual);
  out.gap = std::max(0.0, out.dual_value + out.f_star);
  out.iterations = k;
  return out;
}

LongRunResult reference_by_long_run(const ProblemInstance& problem, long budget,
                                    const LongRunOptions& options) {
  if (budget < 0) throw std::invalid_argument("reference_by_long_run: negative budget");
  LongRunResult result;
  Vector x = problem.projector.project(problem.default_start);
  std::optional<double> best;
  Vector best_x;

  auto consider = [&](const Vector& point, double f, double g) {
    if (g <= options.feasibility_tol && (!best || f < *best)) {
      best = f;
      best_x = point;
    }
  };
  consider(x, problem.objective.value(x), problem.max_constraint(x));

  double delta = 0.1 * std::max(1.0, std::abs(problem.objective.value(x)));
  long used = 0;
  while (used < budget) {
    const double reference = best ? *best : problem.objective.value(x);
    if (delta < options.min_gap * std::max(1.0, std::abs(reference))) break;
    SolverConfig config;
    config.algorithm = Algorithm::ConditionalSwitching;
    config.fbar.f_bar = reference - delta;
    config.max_iters = 1;
    bool improved = false;
    for (long i = 0; i < options.stage_length && used < budget; ++i) {
      config.start = x;
      const RunTrace step = run_conditional_switching(problem, config);
      ++used;
      x = step.final_point;
      consider(x, step.final_f, step.final_g);
      if (best && *best <= reference - 0.5 * delta) {
        improved = true;
        break;
      }
    }
    if (improved) {
      delta *= 2.0;
    } else {
      delta *= 0.5;
      if (best) x = best_x;
    }
  }
  if (!best) throw NoFeasiblePointError("reference run found no feasible point");
  result.f_best = *best;
  result.point = best_x;
  result.feasibility_residual = std::max(0.0, problem.max_constraint(best_x));
  result.iterations = used;
  return result;
}

}  // namespace sharp_subgrad
