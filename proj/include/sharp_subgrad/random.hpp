// Seeded random streams for the instance generators.
//
// Engine: std::mt19937_64 seeded through std::seed_seq{lo32(seed), hi32(seed),
// stream}. Uniform [0, 1) takes the top 53 bits of one draw divided by 2^53.
// Normal variates use Box-Muller on two consecutive uniforms and discard the
// sine branch, so every normal consumes exactly two engine draws.
#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace sharp_subgrad {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint32_t stream = 0);

  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal(double mean = 0.0, double sigma = 1.0);

  Eigen::VectorXd uniform_vector(Eigen::Index n);
  Eigen::VectorXd normal_vector(Eigen::Index n, double sigma = 1.0);
  /// Uniformly distributed direction on the unit sphere.
  Eigen::VectorXd unit_vector(Eigen::Index n);
  /// Uniform point of the ball of the given radius around the origin.
  Eigen::VectorXd in_ball(Eigen::Index n, double radius);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sharp_subgrad
