#include "sharp_subgrad/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace sharp_subgrad {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double(const std::string& s, long line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

long parse_long(const std::string& s, long line_no) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << kTraceCsvHeader << '\n';
  for (const StepRecord& r : trace.records) {
    out << r.iteration << ',' << (r.kind == StepKind::Productive ? 'P' : 'N') << ','
        << format_double(r.f_value) << ',' << format_double(r.g_value) << ','
        << format_double(r.step_size) << ',' << format_double(r.grad_norm) << ','
        << optional_cell(r.gamma) << ',' << optional_cell(r.dist_to_solution) << '\n';
  }
}

RunTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kTraceCsvHeader)
    throw FormatError("trace csv: missing or unexpected header");
  RunTrace trace;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 8)
      throw FormatError("trace csv line " + std::to_string(line_no) + ": expected 8 fields");
    StepRecord r;
    r.iteration = parse_long(cells[0], line_no);
    if (cells[1] == "P")
      r.kind = StepKind::Productive;
    else if (cells[1] == "N")
      r.kind = StepKind::Nonproductive;
    else
      throw FormatError("trace csv line " + std::to_string(line_no) + ": kind must be P or N");
    r.f_value = parse_double(cells[2], line_no);
    r.g_value = parse_double(cells[3], line_no);
    r.step_size = parse_double(cells[4], line_no);
    r.grad_norm = parse_double(cells[5], line_no);
    if (!cells[6].empty()) r.gamma = parse_double(cells[6], line_no);
    if (!cells[7].empty()) r.dist_to_solution = parse_double(cells[7], line_no);
    (r.kind == StepKind::Productive ? trace.productive_set : trace.nonproductive_set)
        .push_back(r.iteration);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

void write_points_csv(std::ostream& out, const RunTrace& trace) {
  const Eigen::Index n = trace.final_point.size();
  out << "k,constraint";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  out << '\n';
  auto row = [&](long k, const std::optional<int>& idx, const Vector& x) {
    if (x.size() != n) throw FormatError("points csv: inconsistent point dimension");
    out << k << ',';
    if (idx) out << *idx;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(x[i]);
    out << '\n';
  };
  for (const StepRecord& r : trace.records) {
    if (!r.point) throw FormatError("points csv: record " + std::to_string(r.iteration) + " has no point");
    row(r.iteration, r.constraint_index, *r.point);
  }
  row(static_cast<long>(trace.records.size()), std::nullopt, trace.final_point);
}

PointLog read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("points csv: empty file");
  const auto header = split(strip_cr(line));
  if (header.size() < 3 || header[0] != "k" || header[1] != "constraint")
    throw FormatError("points csv: unexpected header");
  const std::size_t n = header.size() - 2;
  PointLog log;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != n + 2)
      throw FormatError("points csv line " + std::to_string(line_no) + ": wrong field count");
    if (parse_long(cells[0], line_no) != static_cast<long>(log.points.size()))
      throw FormatError("points csv line " + std::to_string(line_no) + ": rows out of order");
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = parse_double(cells[i + 2], line_no);
    log.points.push_back(std::move(x));
    log.constraint_index.push_back(
        cells[1].empty() ? std::nullopt : std::optional<int>(static_cast<int>(parse_long(cells[1], line_no))));
  }
  if (log.points.empty()) throw FormatError("points csv: no rows");
  log.constraint_index.pop_back();  // the final point drives no step
  return log;
}

nlohmann::json vector_to_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json to_json(const SolverConfig& c) {
  nlohmann::json j{{"algorithm", to_string(c.algorithm)},
                   {"epsilon", c.epsilon},
                   {"f_bar", c.fbar.f_bar},
                   {"C", c.fbar.big_c},
                   {"gamma0", c.gamma0},
                   {"max_iters", c.max_iters},
                   {"aggregation", to_string(c.aggregation)},
                   {"grad_tolerance", c.grad_tolerance},
                   {"record_points", c.record_points},
                   {"early_stop", c.early_stop},
                   {"seed", c.seed}};
  j["f_star"] = c.fbar.f_star ? nlohmann::json(*c.fbar.f_star) : nlohmann::json(nullptr);
  if (c.start) j["start"] = vector_to_json(*c.start);
  return j;
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("f_bar")) c.fbar.f_bar = j.at("f_bar").get<double>();
  if (j.contains("C")) c.fbar.big_c = j.at("C").get<double>();
  if (j.contains("f_star") && !j.at("f_star").is_null()) c.fbar.f_star = j.at("f_star").get<double>();
  if (j.contains("gamma0")) c.gamma0 = j.at("gamma0").get<double>();
  if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<long>();
  if (j.contains("aggregation")) c.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
  if (j.contains("grad_tolerance")) c.grad_tolerance = j.at("grad_tolerance").get<double>();
  if (j.contains("record_points")) c.record_points = j.at("record_points").get<bool>();
  if (j.contains("early_stop")) c.early_stop = j.at("early_stop").get<bool>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("start")) c.start = vector_from_json(j.at("start"));
  return c;
}

}  // namespace sharp_subgrad
