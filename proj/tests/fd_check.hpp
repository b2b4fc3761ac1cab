// Central finite-difference check of every oracle of a generated instance.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "sharp_subgrad/problems.hpp"
#include "sharp_subgrad/random.hpp"

namespace sharp_subgrad::testing {

struct FdStats {
  long points = 0;
  long oracle_checks = 0;
  double worst = 0.0;
  std::string worst_what;
};

inline double fd_error(const Function& f, const Vector& x, double h) {
  const Vector g = f.subgradient(x);
  Vector fd(x.size());
  Vector y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double up = f.value(y);
    y[i] = x[i] - h;
    const double down = f.value(y);
    y[i] = x[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return (fd - g).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
}

// Gap between the two largest entries; small means a max-type kink is near.
inline double top_two_gap(const Vector& v) {
  if (v.size() < 2) return INFINITY;
  double a = -INFINITY, b = -INFINITY;
  for (double t : v) {
    if (t > a) {
      b = a;
      a = t;
    } else if (t > b) {
      b = t;
    }
  }
  return a - b;
}

// Random point of Q away from every kink and singularity of the family
// (distance 1e-4), or nothing when the draw lands too close.
inline std::optional<Vector> smooth_point(const InstanceData& data, RandomStream& rng) {
  constexpr double kMargin = 1e-4;
  return std::visit(
      [&](const auto& d) -> std::optional<Vector> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GeometricData>) {
          const Vector x = rng.in_ball(d.exponents.cols(), d.radius - 2 * kMargin).cwiseAbs();
          if (x.minCoeff() < kMargin) return std::nullopt;
          return x;
        } else if constexpr (std::is_same_v<T, RatioData>) {
          const Vector x = rng.in_ball(d.b.size(), d.radius);
          if (x.norm() < kMargin) return std::nullopt;
          if (d.variant == RatioVariant::NormCone &&
              std::abs(-d.cone_dir.dot(x) - x.norm()) < kMargin)
            return std::nullopt;
          return x;
        } else if constexpr (std::is_same_v<T, TrussData>) {
          return rng.in_ball(d.weights.size(), d.radius);
        } else if constexpr (std::is_same_v<T, KlData>) {
          Vector x(d.a.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(1e-3, 3.0);
          return x;
        } else {
          const Vector x = rng.in_ball(d.x_star.size(), d.radius);
          const Vector diff = x - d.x_star;
          if (diff.norm() < kMargin) return std::nullopt;
          const Vector rotated = diff - 2.0 * d.rotation * d.rotation.dot(diff);
          if (top_two_gap(d.scale * rotated.cwiseAbs()) < kMargin) return std::nullopt;
          return x;
        }
      },
      data);
}

inline FdStats fd_check(const GeneratorSpec& spec, int points, std::uint64_t seed, double h = 1e-6) {
  const InstanceData data = generate_data(spec);
  const ProblemInstance p = build_instance(data, spec);
  RandomStream rng(seed, 99);
  FdStats s;
  auto check = [&](const Function& f, const Vector& x, const std::string& what) {
    const double e = fd_error(f, x, h);
    ++s.oracle_checks;
    if (e > s.worst) {
      s.worst = e;
      s.worst_what = what;
    }
  };
  for (int attempts = 0; s.points < points && attempts < 100 * points; ++attempts) {
    const auto x = smooth_point(data, rng);
    if (!x) continue;
    ++s.points;
    check(p.objective, *x, p.family + " objective");
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
      check(p.constraints[i], *x, p.family + " constraint " + std::to_string(i));
  }
  return s;
}

}  // namespace sharp_subgrad::testing
