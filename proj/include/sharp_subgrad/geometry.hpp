// Euclidean projections onto the feasible sets used by the experiments.
#pragma once

#include <variant>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace sharp_subgrad {

using Vector = Eigen::VectorXd;

struct WholeSpace {};

struct Ball {
  Vector center;
  double radius = 1.0;
};

/// {x : x_i >= floor, ||x||_2 <= radius}: the (shrunken) nonnegative part of
/// the origin-centered ball.
struct NonnegBall {
  double radius = 1.0;
  double floor = 1e-8;
};

/// Componentwise bounds; entries of `upper` may be +infinity.
struct Box {
  Vector lower;
  Vector upper;
};

class Projector {
 public:
  using Kind = std::variant<WholeSpace, Ball, NonnegBall, Box>;

  Projector() = default;

  static Projector whole_space();
  static Projector ball(Vector center, double radius);
  static Projector nonneg_ball(double radius, double floor = 1e-8);
  static Projector box(Vector lower, Vector upper);

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// Nearest point of Q. Throws std::invalid_argument on dimension mismatch
  /// or non-finite input.
  Vector project(const Vector& x) const;

  /// Largest violation of the set's defining inequalities (0 when inside).
  double violation(const Vector& x) const;

 private:
  explicit Projector(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_{WholeSpace{}};
};

inline Vector project(const Projector& projector, const Vector& x) { return projector.project(x); }

nlohmann::json to_json(const Projector& projector);
Projector projector_from_json(const nlohmann::json& j);

}  // namespace sharp_subgrad
