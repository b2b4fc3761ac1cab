#include "sharp_subgrad/random.hpp"

#include <cmath>
#include <numbers>

namespace sharp_subgrad {

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal(double mean, double sigma) {
  const double u1 = uniform_open_closed();
  const double u2 = uniform();
  return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd RandomStream::uniform_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform();
  return v;
}

Eigen::VectorXd RandomStream::normal_vector(Eigen::Index n, double sigma) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(0.0, sigma);
  return v;
}

Eigen::VectorXd RandomStream::unit_vector(Eigen::Index n) {
  Eigen::VectorXd v = normal_vector(n);
  double norm = v.norm();
  while (norm == 0.0) {
    v = normal_vector(n);
    norm = v.norm();
  }
  return v / norm;
}

Eigen::VectorXd RandomStream::in_ball(Eigen::Index n, double radius) {
  Eigen::VectorXd dir = unit_vector(n);
  return dir * (radius * std::pow(uniform(), 1.0 / static_cast<double>(n)));
}

}  // namespace sharp_subgrad
