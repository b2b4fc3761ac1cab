#include "sharp_subgrad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sharp_subgrad {
namespace {

// Points within this relative band of the sphere count as inside, which keeps
// projection idempotent after rounding.
constexpr double kRadiusBand = 1e-14;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const Vector& x) {
  if (!x.allFinite()) throw std::invalid_argument("projection of a non-finite point");
}

void require_dimension(const Vector& x, Eigen::Index n) {
  if (x.size() != n)
    throw std::invalid_argument("dimension mismatch: point has " + std::to_string(x.size()) +
                                " entries, set has " + std::to_string(n));
}

Vector project_ball(const Ball& b, const Vector& x) {
  require_dimension(x, b.center.size());
  const Vector d = x - b.center;
  const double norm = d.norm();
  if (norm <= b.radius * (1.0 + kRadiusBand)) return x;
  return b.center + d * (b.radius / norm);
}

// Exact projection onto {x >= eta} intersected with the origin ball. The
// minimizer has the form x_i = max(eta, t y_i) for some t in (0, 1]; t is found
// by scanning the candidate sets of free coordinates in decreasing order of y.
Vector project_nonneg_ball(const NonnegBall& s, const Vector& y) {
  const auto n = y.size();
  if (n == 0) throw std::invalid_argument("projection of an empty vector");
  const double eta = s.floor;
  const double r = s.radius;
  if (!(eta * std::sqrt(static_cast<double>(n)) < r))
    throw std::invalid_argument("nonnegative ball: floor * sqrt(n) must be below the radius");

  Vector z = y.cwiseMax(eta);
  const double znorm = z.norm();
  if (znorm <= r * (1.0 + kRadiusBand)) return z;
  if (eta == 0.0) return z * (r / znorm);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return y[a] > y[b]; });

  double free_sq = 0.0;
  double t = 1.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double yk = y[order[k - 1]];
    if (yk <= 0.0) break;
    free_sq += yk * yk;
    const double rest = r * r - static_cast<double>(n - k) * eta * eta;
    const double cand = std::sqrt(rest / free_sq);
    const bool next_clamped = (k == n) || (y[order[k]] * cand <= eta);
    if (yk * cand > eta && next_clamped) {
      t = cand;
      break;
    }
  }
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(eta, t * y[i]);
  return out;
}

Vector project_box(const Box& b, const Vector& x) {
  require_dimension(x, b.lower.size());
  return x.cwiseMax(b.lower).cwiseMin(b.upper);
}

nlohmann::json bounds_to_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i]))
      arr.push_back(v[i]);
    else
      arr.push_back(nullptr);
  }
  return arr;
}

Vector bounds_from_json(const nlohmann::json& j, double missing) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].is_null() ? missing : j[i].get<double>();
  return v;
}

}  // namespace

Projector Projector::whole_space() { return Projector(WholeSpace{}); }

Projector Projector::ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (center.size() == 0) throw std::invalid_argument("ball center must be nonempty");
  return Projector(Ball{std::move(center), radius});
}

Projector Projector::nonneg_ball(double radius, double floor) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (!(floor >= 0.0)) throw std::invalid_argument("floor must be nonnegative");
  return Projector(NonnegBall{radius, floor});
}

Projector Projector::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("box bounds must be nonempty and of equal size");
  if ((lower.array() > upper.array()).any())
    throw std::invalid_argument("box lower bound exceeds upper bound");
  return Projector(Box{std::move(lower), std::move(upper)});
}

std::string Projector::name() const {
  return std::visit(Overloaded{[](const WholeSpace&) { return std::string("whole-space"); },
                               [](const Ball&) { return std::string("ball"); },
                               [](const NonnegBall&) { return std::string("nonneg-ball"); },
                               [](const Box&) { return std::string("box"); }},
                    kind_);
}

Vector Projector::project(const Vector& x) const {
  require_finite(x);
  return std::visit(Overloaded{[&](const WholeSpace&) { return x; },
                               [&](const Ball& b) { return project_ball(b, x); },
                               [&](const NonnegBall& s) { return project_nonneg_ball(s, x); },
                               [&](const Box& b) { return project_box(b, x); }},
                    kind_);
}

double Projector::violation(const Vector& x) const {
  return std::visit(
      Overloaded{[&](const WholeSpace&) { return 0.0; },
                 [&](const Ball& b) { return std::max(0.0, (x - b.center).norm() - b.radius); },
                 [&](const NonnegBall& s) {
                   return std::max({0.0, x.norm() - s.radius, s.floor - x.minCoeff()});
                 },
                 [&](const Box& b) {
                   const double below = (b.lower - x).maxCoeff();
                   const double above = (x - b.upper).maxCoeff();
                   return std::max({0.0, below, above});
                 }},
      kind_);
}

nlohmann::json to_json(const Projector& projector) {
  return std::visit(
      Overloaded{[](const WholeSpace&) { return nlohmann::json{{"kind", "whole-space"}}; },
                 [](const Ball& b) {
                   return nlohmann::json{
                       {"kind", "ball"}, {"center", bounds_to_json(b.center)}, {"radius", b.radius}};
                 },
                 [](const NonnegBall& s) {
                   return nlohmann::json{
                       {"kind", "nonneg-ball"}, {"radius", s.radius}, {"floor", s.floor}};
                 },
                 [](const Box& b) {
                   return nlohmann::json{{"kind", "box"},
                                         {"lower", bounds_to_json(b.lower)},
                                         {"upper", bounds_to_json(b.upper)}};
                 }},
      projector.kind());
}

Projector projector_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "whole-space") return Projector::whole_space();
  if (kind == "ball")
    return Projector::ball(bounds_from_json(j.at("center"), 0.0), j.at("radius").get<double>());
  if (kind == "nonneg-ball")
    return Projector::nonneg_ball(j.at("radius").get<double>(), j.at("floor").get<double>());
  if (kind == "box") {
    const double inf = std::numeric_limits<double>::infinity();
    return Projector::box(bounds_from_json(j.at("lower"), -inf), bounds_from_json(j.at("upper"), inf));
  }
  throw std::invalid_argument("unknown projector kind '" + kind + "'");
}

}  // namespace sharp_subgrad
