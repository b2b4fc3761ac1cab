// Benchmark instance generators and reference-optimum oracles.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "sharp_subgrad/core.hpp"

namespace sharp_subgrad {

using Matrix = Eigen::MatrixXd;

enum class Family { GeometricProgram, RatioDistances, TrussDesign, KlConstrained, SyntheticSharp };
enum class RatioVariant { NormCone, LinearMax };

std::string to_string(Family family);
Family parse_family(const std::string& name);
std::string to_string(RatioVariant variant);
RatioVariant parse_ratio_variant(const std::string& name);

struct GeneratorSpec {
  Family family = Family::SyntheticSharp;
  RatioVariant variant = RatioVariant::NormCone;
  int n = 20;
  int m = 5;
  double p = 5.0;
  double radius = 1.0;
  double noise_sigma = 0.1;
  /// Divergence budget B of the KL family.
  double budget = 1000.0;
  /// Lower bound eta used to keep posynomial and log oracles defined.
  double floor = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);

// Coefficient data of each family. Instances are built from these, so an
// instance artifact only has to carry the data.

struct GeometricData {
  double p = 5.0;
  Vector coeff;      // a_i > 0, size m
  Matrix exponents;  // alpha_ij, m x n
  Vector offset;     // b_i, size m
  double radius = 1.0;
  double floor = 1e-8;
};

struct RatioData {
  RatioVariant variant = RatioVariant::NormCone;
  Vector b;  // ||b||_2 = 2, objective anchor a = 0
  // NormCone: g(x) = ||x|| + max(<-cone_dir, x>, ||x||) - cone_offset
  Vector cone_dir;
  double cone_offset = 0.0;
  // LinearMax: g_i(x) = <rows_i, x> - offsets_i
  Matrix rows;
  Vector offsets;
  double radius = 1.0;
  double lipschitz_f = 0.0;
};

struct TrussData {
  Vector weights;  // alpha
  Matrix rows;     // a_i, m x n
  double radius = 1.0;
  std::optional<double> f_star;
  /// Certified bound on f_star - f*.
  std::optional<double> f_star_gap;
};

struct KlData {
  Vector a;
  double budget = 1000.0;
  double floor = 1e-8;
  std::optional<double> f_star;
  std::optional<Vector> x_star;
  std::optional<double> lambda_star;
};

struct SyntheticData {
  Vector x_star;
  /// Householder vector v of the rotation R = I - 2 v v^T.
  Vector rotation;
  double scale = 2.0;   // c, norm of every box row
  double slack = 1e-3;  // s, g_box(x_star) = -s
  Matrix rows;          // extra halfspaces
  Vector offsets;
  double radius = 1.0;
};

using InstanceData = std::variant<GeometricData, RatioData, TrussData, KlData, SyntheticData>;

InstanceData generate_data(const GeneratorSpec& spec);
ProblemInstance build_instance(const InstanceData& data, const GeneratorSpec& spec);

ProblemInstance gen_geometric_program(const GeneratorSpec& spec);
ProblemInstance gen_ratio_problem(const GeneratorSpec& spec);
ProblemInstance gen_truss_problem(const GeneratorSpec& spec);
ProblemInstance gen_kl_problem(const GeneratorSpec& spec);
ProblemInstance gen_synthetic_sharp(const GeneratorSpec& spec);
/// Dispatches on spec.family.
ProblemInstance generate(const GeneratorSpec& spec);

/// Instance artifact: {"family", "spec", "data"}.
nlohmann::json instance_to_json(const ProblemInstance& problem);
ProblemInstance instance_from_json(const nlohmann::json& j);

/// Generalized KL divergence sum_i x_i log(x_i / a_i) - x_i + a_i.
double generalized_kl(const Vector& x, const Vector& a);

struct KlOptimum {
  double f_star = 0.0;
  Vector x_star;
  double lambda_star = 0.0;
  /// |KL(x*, a) - B|
  double kl_residual = 0.0;
  /// max_i |a_i - lambda log(x_i / a_i)|
  double stationarity_residual = 0.0;
  int bisection_steps = 0;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

/// Solves max a^T x s.t. KL(x, a) <= B through x_i(lambda) = a_i exp(a_i / lambda)
/// and bisection on lambda.
KlOptimum kl_reference_optimum(const Vector& a, double budget, double tol = 1e-10);

struct TrussOptimum {
  /// Objective value of `x_feasible`, so never below f*.
  double f_star = 0.0;
  Vector x_feasible;
  /// min_y ||y||_1 + r ||w - A^T y||, an upper bound on -f*.
  double dual_value = 0.0;
  /// f_star + dual_value >= f_star - f*.
  double gap = 0.0;
  long iterations = 0;
};

/// Optimum of min -<w, x> s.t. |<a_i, x>| <= 1, ||x|| <= r through its dual
/// min_y ||y||_1 + r ||w - A^T y|| (accelerated proximal gradient). The primal
/// point is recovered from the dual iterate and scaled back into the feasible set.
TrussOptimum truss_reference_optimum(const Vector& weights, const Matrix& rows, double radius,
                                     long max_iters = 100000, double tol = 1e-12);

class NoFeasiblePointError : public Error {
 public:
  using Error::Error;
};

struct LongRunOptions {
  /// Iterates with max_i g_i at or below this count as feasible.
  double feasibility_tol = 1e-9;
  long stage_length = 400;
  /// Stop once the target gap shrinks below this (relative to max(1, |f|)).
  double min_gap = 1e-12;
};

struct LongRunResult {
  double f_best = 0.0;
  double feasibility_residual = 0.0;
  Vector point;
  long iterations = 0;
};

/// Best feasible objective value found by conditional-switching runs aimed at
/// the level f_bar = best - delta. A stage that fails to improve the best value
/// by delta / 2 halves delta and restarts from the best point.
LongRunResult reference_by_long_run(const ProblemInstance& problem, long budget,
                                    const LongRunOptions& options = {});

}  // namespace sharp_subgrad
