// Command-line experiment runner: `run`, `compare`, `verify`.
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sharp_subgrad/core.hpp"
#include "sharp_subgrad/problems.hpp"

namespace sharp_subgrad::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kVerifyFailed = 4,
};

/// How the solver obtains f_bar.
struct FBarSpec {
  enum class Kind { Exact, Value, Gap } kind = Kind::Exact;
  /// Value: f_bar itself. Gap: f_bar = f* + value * (f(x0) - f*).
  double value = 0.0;
};

struct SolverSpec {
  std::string label;
  SolverConfig config;
  FBarSpec fbar;
};

struct ExperimentConfig {
  GeneratorSpec generator;
  std::vector<SolverSpec> solvers;
  std::filesystem::path output_dir;
  std::set<std::string> emit;
  bool full_scale = false;
};

/// Resolves f_bar against the instance. Throws std::invalid_argument when an
/// exact or gap estimate is requested without a known f*.
FBarModel resolve_fbar(const FBarSpec& spec, double big_c, const ProblemInstance& problem,
                       const SolverConfig& config);

int cmd_run(const ExperimentConfig& config);
int cmd_compare(const ExperimentConfig& config);

struct VerifyInputs {
  std::filesystem::path trace_csv;
  std::filesystem::path points_csv;
  std::filesystem::path instance_json;
  std::optional<std::filesystem::path> summary_json;
  std::filesystem::path verify_json;
  double tol = 1e-9;
};

int cmd_verify(const VerifyInputs& inputs);

/// Full command-line entry point; args exclude the program name.
int main_entry(const std::vector<std::string>& args);

}  // namespace sharp_subgrad::cli
