// Small hand-built instances shared by the unit tests.
#pragma once

#include <cmath>

#include "sharp_subgrad/core.hpp"

namespace sharp_subgrad::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

// f = |x| on the line, one constraint g(x) = slope * x - offset.
inline ProblemInstance abs_on_line(double slope, double offset, double x0) {
  ProblemInstance p;
  p.family = "test";
  p.dimension = 1;
  p.objective = Function([](const Vector& x) { return std::abs(x[0]); },
                         [](const Vector& x) { return vec({x[0] >= 0.0 ? 1.0 : -1.0}); });
  p.constraints.push_back(Function([=](const Vector& x) { return slope * x[0] - offset; },
                                   [=](const Vector&) { return vec({slope}); }));
  p.projector = Projector::whole_space();
  p.lipschitz_f = 1.0;
  p.default_start = vec({x0});
  return p;
}

// Same objective with a constraint that never binds.
inline ProblemInstance abs_unconstrained(double x0) {
  ProblemInstance p = abs_on_line(0.0, 1.0, x0);
  return p;
}

}  // namespace sharp_subgrad::testing
