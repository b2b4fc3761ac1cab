// Trace and configuration serialization.
//
// trace.csv   header `k,kind,f,g,h,grad_norm,gamma,dist`, kind in {P, N},
//             empty gamma / dist when unknown, %.17g floats.
// points.csv  header `k,constraint,x0,...,x{n-1}`, rows k = 0..K where row K is
//             the final point; `constraint` holds the index driving a
//             nonproductive step and is empty otherwise.
#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "sharp_subgrad/core.hpp"

namespace sharp_subgrad {

inline constexpr const char* kTraceCsvHeader = "k,kind,f,g,h,grad_norm,gamma,dist";

class FormatError : public Error {
 public:
  using Error::Error;
};

/// %.17g; round-trips every finite double.
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const RunTrace& trace);
/// Reads records only (no points, no final state). Throws FormatError.
RunTrace read_trace_csv(std::istream& in);

/// Requires every record to carry a point.
void write_points_csv(std::ostream& out, const RunTrace& trace);

struct PointLog {
  std::vector<Vector> points;  // x_0 .. x_K
  std::vector<std::optional<int>> constraint_index;  // size K
};

PointLog read_points_csv(std::istream& in);

nlohmann::json to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace sharp_subgrad
