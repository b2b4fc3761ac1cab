#include "sharp_subgrad/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sharp_subgrad/analysis.hpp"
#include "sharp_subgrad/io.hpp"
#include "sharp_subgrad/solvers.hpp"

namespace sharp_subgrad::cli {
namespace fs = std::filesystem;
namespace {

constexpr int kDeskScaleMaxDimension = 5000;
const std::set<std::string> kEmitKinds = {"trace_csv", "summary_json", "instance_json", "verify_json"};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FBarSpec parse_fbar(const std::string& text) {
  FBarSpec s;
  if (text == "exact") return s;
  try {
    if (text.rfind("gap:", 0) == 0) {
      s.kind = FBarSpec::Kind::Gap;
      s.value = std::stod(text.substr(4));
    } else {
      s.kind = FBarSpec::Kind::Value;
      std::size_t used = 0;
      s.value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw ConfigError("bad --fbar value '" + text + "' (expected exact, a number or gap:<frac>)");
  }
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string trace_csv_text(const RunTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

void check_scale(const ExperimentConfig& config) {
  if (config.generator.n > kDeskScaleMaxDimension && !config.full_scale)
    throw ConfigError("n = " + std::to_string(config.generator.n) +
                      " exceeds desk scale; pass --scale full to run it");
}

ProblemInstance make_instance(const ExperimentConfig& config) {
  check_scale(config);
  try {
    return generate(config.generator);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SolverConfig prepared_config(const SolverSpec& spec, const ProblemInstance& problem) {
  SolverConfig c = spec.config;
  try {
    c.fbar = resolve_fbar(spec.fbar, spec.config.fbar.big_c, problem, c);
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

nlohmann::json run_summary(const RunTrace& trace, const SolverConfig& config,
                           const ProblemInstance& problem, const ExperimentConfig& experiment,
                           double wall_seconds) {
  nlohmann::json s;
  s["family"] = problem.family;
  s["generator"] = to_json(experiment.generator);
  s["config"] = to_json(config);
  s["seed"] = experiment.generator.seed;
  s["iterations"] = trace.size();
  s["productive_steps"] = trace.productive_set.size();
  s["nonproductive_steps"] = trace.nonproductive_set.size();
  s["best_feasible_f"] = trace.best_f ? nlohmann::json(*trace.best_f) : nlohmann::json(nullptr);
  s["best_iteration"] = trace.best_iteration ? nlohmann::json(*trace.best_iteration) : nlohmann::json(nullptr);
  s["final_f"] = trace.final_f;
  s["final_g"] = trace.final_g;
  s["final_dist"] = trace.final_dist ? nlohmann::json(*trace.final_dist) : nlohmann::json(nullptr);
  s["constraint_evaluations"] = trace.constraint_evaluations;
  s["terminated_early"] = trace.terminated_early;
  s["termination_reason"] = trace.termination_reason;
  s["wall_time_s"] = wall_seconds;
  s["lipschitz_f"] = problem.lipschitz_f;
  if (problem.ground_truth) {
    const double f_star = problem.ground_truth->f_star;
    s["f_star"] = f_star;
    const auto first = first_eps_solution(trace, f_star, config.epsilon);
    if (first) {
      s["first_eps_solution"] = *first;
      long productive = 0;
      for (long i : trace.productive_set)
        if (i < *first) ++productive;
      s["productive_steps_to_first_eps_solution"] = productive;
    } else {
      s["first_eps_solution"] = "not reached";
    }
  } else {
    s["f_star"] = nullptr;
    s["first_eps_solution"] = "unknown f*";
  }
  return s;
}

struct TimedRun {
  RunTrace trace;
  double seconds = 0.0;
};

TimedRun timed_run(const ProblemInstance& problem, const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun r;
  r.trace = run_solver(problem, config);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int report_exception(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
      dynamic_cast<const FormatError*>(&e)) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (dynamic_cast<const Error*>(&e)) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
  std::cerr << "error: " << e.what() << "\n";
  return kFailure;
}

void prepare_output(const ExperimentConfig& config) {
  if (config.emit.empty()) throw ConfigError("nothing to emit");
  for (const auto& e : config.emit)
    if (!kEmitKinds.count(e)) throw ConfigError("unknown emit kind '" + e + "'");
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + config.output_dir.string());
}

// ---------------------------------------------------------------- verify

struct StepCheck {
  long step;
  std::string what;
  double residual;
};

double scaled(double tol, double a, double b = 0.0) { return tol * std::max({1.0, a, b}); }

}  // namespace

FBarModel resolve_fbar(const FBarSpec& spec, double big_c, const ProblemInstance& problem,
                       const SolverConfig& config) {
  FBarModel m;
  m.big_c = big_c;
  if (problem.ground_truth) m.f_star = problem.ground_truth->f_star;
  switch (spec.kind) {
    case FBarSpec::Kind::Value:
      m.f_bar = spec.value;
      break;
    case FBarSpec::Kind::Exact:
      if (!m.f_star) throw std::invalid_argument("exact f_bar requested but f* is unknown for this instance");
      m.f_bar = *m.f_star;
      break;
    case FBarSpec::Kind::Gap: {
      if (!m.f_star) throw std::invalid_argument("gap f_bar requested but f* is unknown for this instance");
      const Vector x0 = problem.projector.project(config.start ? *config.start : problem.default_start);
      m.f_bar = *m.f_star + spec.value * (problem.objective.value(x0) - *m.f_star);
      break;
    }
  }
  m.validate();
  return m;
}

int cmd_run(const ExperimentConfig& config) {
  try {
    if (config.solvers.size() != 1) throw ConfigError("run takes exactly one solver configuration");
    prepare_output(config);
    const ProblemInstance problem = make_instance(config);
    SolverConfig sc = prepared_config(config.solvers.front(), problem);
    const bool verify = config.emit.count("verify_json") > 0;
    if (verify) sc.record_points = true;
    const TimedRun run = timed_run(problem, sc);

    const fs::path& out = config.output_dir;
    if (config.emit.count("trace_csv")) write_file(out / "trace.csv", trace_csv_text(run.trace));
    if (sc.record_points) {
      std::ostringstream pts;
      write_points_csv(pts, run.trace);
      write_file(out / "points.csv", pts.str());
    }
    const nlohmann::json summary = run_summary(run.trace, sc, problem, config, run.seconds);
    if (config.emit.count("summary_json") || verify) write_json(out / "summary.json", summary);
    if (config.emit.count("instance_json") || verify) write_json(out / "instance.json", instance_to_json(problem));
    if (verify) {
      if (!config.emit.count("trace_csv")) write_file(out / "trace.csv", trace_csv_text(run.trace));
      return cmd_verify({out / "trace.csv", out / "points.csv", out / "instance.json",
                         out / "summary.json", out / "verify.json"});
    }
    return kOk;
  } catch (const std::exception& e) {
    return report_exception(e);
  }
}

int cmd_compare(const ExperimentConfig& config) {
  try {
    if (config.solvers.size() < 2) throw ConfigError("compare needs at least two solver configurations");
    prepare_output(config);
    const ProblemInstance problem = make_instance(config);
    std::vector<SolverConfig> configs;
    for (const SolverSpec& s : config.solvers) configs.push_back(prepared_config(s, problem));

    std::vector<std::future<TimedRun>> futures;
    for (const SolverConfig& c : configs)
      futures.push_back(std::async(std::launch::async, [&problem, c] { return timed_run(problem, c); }));
    std::vector<TimedRun> runs;
    for (auto& f : futures) runs.push_back(f.get());

    const fs::path& out = config.output_dir;
    std::size_t rows = 0;
    for (const TimedRun& r : runs) rows = std::max(rows, r.trace.size());
    std::ostringstream csv;
    csv << "k";
    for (const SolverSpec& s : config.solvers) csv << ",f_" << s.label << ",g_" << s.label;
    csv << '\n';
    for (std::size_t k = 0; k < rows; ++k) {
      csv << k;
      for (const TimedRun& r : runs) {
        if (k < r.trace.size())
          csv << ',' << format_double(r.trace.records[k].f_value) << ','
              << format_double(r.trace.records[k].g_value);
        else
          csv << ",,";
      }
      csv << '\n';
    }
    write_file(out / "combined.csv", csv.str());

    nlohmann::json summary;
    summary["family"] = problem.family;
    summary["seed"] = config.generator.seed;
    summary["solvers"] = nlohmann::json::object();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string& label = config.solvers[i].label;
      summary["solvers"][label] = run_summary(runs[i].trace, configs[i], problem, config, runs[i].seconds);
      if (config.emit.count("trace_csv"))
        write_file(out / ("trace_" + label + ".csv"), trace_csv_text(runs[i].trace));
    }
    if (config.emit.count("summary_json")) write_json(out / "summary.json", summary);
    if (config.emit.count("instance_json")) write_json(out / "instance.json", instance_to_json(problem));
    return kOk;
  } catch (const std::exception& e) {
    return report_exception(e);
  }
}

int cmd_verify(const VerifyInputs& inputs) {
  ProblemInstance problem;
  RunTrace trace;
  PointLog log;
  std::optional<nlohmann::json> summary;
  try {
    for (const fs::path& p : {inputs.instance_json, inputs.trace_csv, inputs.points_csv})
      if (!fs::exists(p)) throw ConfigError("missing artifact " + p.string());
    problem = instance_from_json(read_json(inputs.instance_json));
    std::ifstream tin(inputs.trace_csv);
    trace = read_trace_csv(tin);
    std::ifstream pin(inputs.points_csv);
    log = read_points_csv(pin);
    if (inputs.summary_json && fs::exists(*inputs.summary_json)) summary = read_json(*inputs.summary_json);
    if (log.points.size() != trace.size() + 1)
      throw ConfigError("points csv has " + std::to_string(log.points.size()) + " rows, expected " +
                        std::to_string(trace.size() + 1));
    for (const Vector& x : log.points)
      if (x.size() != problem.dimension) throw ConfigError("points csv dimension does not match the instance");
  } catch (const std::exception& e) {
    return report_exception(e);
  }

  const double tol = inputs.tol;
  std::vector<StepCheck> failures;
  auto fail = [&](long k, std::string what, double residual) {
    failures.push_back({k, std::move(what), residual});
  };

  std::optional<SolverConfig> config;
  if (summary && summary->contains("config")) config = solver_config_from_json(summary->at("config"));

  // Reference points of Q for the projection inequality.
  std::vector<Vector> refs = {log.points.front(), log.points.back()};
  if (problem.ground_truth)
    for (const Vector& s : problem.ground_truth->solutions) refs.push_back(problem.projector.project(s));

  long projection_checks = 0;
  const long steps = static_cast<long>(trace.size());
  for (long k = 0; k < steps; ++k) {
    const StepRecord& r = trace.records[static_cast<std::size_t>(k)];
    const Vector& x = log.points[static_cast<std::size_t>(k)];
    const Vector& x_next = log.points[static_cast<std::size_t>(k + 1)];
    const double xn = x.squaredNorm();
    try {
      const double f = problem.objective.value(x);
      if (std::abs(f - r.f_value) > scaled(tol, std::abs(f)))
        fail(k, "recorded f differs from the oracle", f - r.f_value);

      Vector grad;
      if (r.kind == StepKind::Productive) {
        grad = problem.objective.subgradient(x);
        const double g = problem.max_constraint(x);
        if (std::abs(g - r.g_value) > scaled(tol, std::abs(g)))
          fail(k, "recorded g differs from the oracle", g - r.g_value);
      } else {
        const auto& idx = log.constraint_index[static_cast<std::size_t>(k)];
        if (!idx || *idx < 0 || *idx >= static_cast<int>(problem.constraints.size())) {
          fail(k, "nonproductive step without a valid constraint index", 0.0);
          continue;
        }
        const Function& c = problem.constraints[static_cast<std::size_t>(*idx)];
        const double g = c.value(x);
        if (std::abs(g - r.g_value) > scaled(tol, std::abs(g)))
          fail(k, "recorded g differs from the oracle", g - r.g_value);
        grad = c.subgradient(x);
      }
      if (std::abs(grad.norm() - r.grad_norm) > scaled(tol, grad.norm()))
        fail(k, "recorded gradient norm differs from the oracle", grad.norm() - r.grad_norm);

      const Vector expected = r.step_size > 0.0 ? problem.projector.project(x - r.step_size * grad) : x;
      const double gap = (expected - x_next).norm();
      if (gap > scaled(tol, std::sqrt(xn), x_next.norm()))
        fail(k, "x_{k+1} is not the projected step from x_k", gap);

      for (const Vector& ref : refs) {
        const ProjectionCheck pc = check_projection_inequality(x, x_next, ref, r.step_size, grad,
                                                               scaled(tol, xn, ref.squaredNorm()));
        ++projection_checks;
        if (!pc.holds) fail(k, "projection inequality violated", pc.residual);
      }
    } catch (const std::exception& e) {
      fail(k, std::string("oracle failure: ") + e.what(), 0.0);
    }
  }

  nlohmann::json report;
  report["steps"] = steps;
  report["projection_checks"] = projection_checks;
  report["tolerance"] = tol;

  // Theorem alternative: exact f_bar and a known sharpness constant.
  const auto& gt = problem.ground_truth;
  if (config && gt && gt->has_distance() && config->algorithm != Algorithm::BaselineSwitching &&
      config->fbar.f_bar == gt->f_star && (gt->sharpness_alpha || gt->eps_sharpness_alpha)) {
    const bool cond = config->algorithm == Algorithm::ConditionalSwitching;
    std::optional<double> alpha = gt->sharpness_alpha;
    if (!cond && gt->eps_sharpness_alpha) alpha = gt->eps_sharpness_alpha(config->epsilon);
    if (alpha) {
      try {
        RunTrace replay = trace;
        const Vector& x_final = log.points.back();
        replay.final_f = problem.objective.value(x_final);
        replay.final_g = problem.max_constraint(x_final);
        replay.final_dist = gt->dist(x_final);
        const ContractionParams params{*alpha, problem.lipschitz_f, problem.lipschitz_g,
                                       config->fbar.big_c};
        const TheoremReport tr =
            verify_theorem_alternative(replay, problem, params, config->epsilon,
                                       cond ? TheoremVariant::Theorem2 : TheoremVariant::Theorem1, tol);
        nlohmann::json j = to_json(tr);
        j.erase("bound");
        report["theorem"] = j;
        for (const TheoremFailure& f : tr.failures) fail(f.step, "theorem alternative: " + f.reason, f.residual);
      } catch (const std::exception& e) {
        fail(0, std::string("theorem check: ") + e.what(), 0.0);
      }
    }
  }

  std::sort(failures.begin(), failures.end(),
            [](const StepCheck& a, const StepCheck& b) { return a.step < b.step; });
  auto list = nlohmann::json::array();
  for (const StepCheck& f : failures)
    list.push_back({{"step", f.step}, {"check", f.what}, {"residual", f.residual}});
  report["passed"] = failures.empty();
  report["failures"] = list;
  if (!failures.empty()) report["first_failing_iteration"] = failures.front().step;
  try {
    if (!inputs.verify_json.empty()) write_json(inputs.verify_json, report);
  } catch (const std::exception& e) {
    return report_exception(e);
  }
  if (!failures.empty()) {
    std::cerr << "verify failed at iteration " << failures.front().step << ": " << failures.front().what
              << " (residual " << format_double(failures.front().residual) << ")\n";
    return kVerifyFailed;
  }
  return kOk;
}

namespace {

struct SharedFlags {
  std::string config_file;
  std::string family, variant, algo, algos, aggregation, fbar = "exact", out, emit, scale = "desk";
  int n = 0, m = 0;
  double p = 0, radius = 0, sigma = 0, budget = 0, floor = 0, eps = 0, big_c = 0, gamma0 = 0;
  long iters = 0;
  std::uint64_t seed = 0;
  bool record_points = false, early_stop = false;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool compare) {
    opts["config"] = app->add_option("--config", config_file, "JSON config file; flags override it");
    opts["family"] = app->add_option("--family", family, "synthetic-sharp | geometric | ratio | truss | kl");
    opts["variant"] = app->add_option("--variant", variant, "ratio constraint: norm-cone | linear-max");
    opts["n"] = app->add_option("--n", n, "dimension");
    opts["m"] = app->add_option("--m", m, "number of constraints / rows");
    opts["p"] = app->add_option("--p", p, "p-norm order (geometric)");
    opts["radius"] = app->add_option("--radius", radius, "radius of Q");
    opts["sigma"] = app->add_option("--sigma", sigma, "row noise (truss)");
    opts["budget"] = app->add_option("--budget", budget, "divergence budget B (kl)");
    opts["floor"] = app->add_option("--floor", floor, "coordinate floor of Q (geometric, kl)");
    opts["seed"] = app->add_option("--seed", seed, "instance seed");
    if (compare)
      opts["algos"] = app->add_option("--algos", algos, "comma list of eps | cond | baseline");
    else
      opts["algo"] = app->add_option("--algo", algo, "eps | cond | baseline");
    opts["eps"] = app->add_option("--eps", eps, "epsilon");
    opts["C"] = app->add_option("--C", big_c, "f_bar inexactness constant C in (0, 1]");
    opts["gamma0"] = app->add_option("--gamma0", gamma0, "initial gamma");
    opts["iters"] = app->add_option("--iters", iters, "iteration budget N");
    opts["aggregation"] = app->add_option("--aggregation", aggregation, "max | first");
    opts["fbar"] = app->add_option("--fbar", fbar, "exact | <number> | gap:<frac>");
    opts["record-points"] = app->add_flag("--record-points", record_points, "write points.csv");
    opts["early-stop"] = app->add_flag("--early-stop", early_stop, "stop at the first f <= f_bar, g <= eps");
    opts["out"] = app->add_option("--out", out, "output directory");
    opts["emit"] = app->add_option("--emit", emit, "comma list of trace_csv,summary_json,instance_json,verify_json");
    opts["scale"] = app->add_option("--scale", scale, "desk | full");
  }
  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

ExperimentConfig build_experiment(const SharedFlags& f, bool compare) {
  nlohmann::json file = nlohmann::json::object();
  if (f.given("config")) file = read_json(f.config_file);

  ExperimentConfig ex;
  nlohmann::json gen = file.value("generator", nlohmann::json::object());
  if (!gen.contains("family") && !f.given("family")) throw ConfigError("--family is required");
  try {
    ex.generator = generator_spec_from_json(gen);
    if (f.given("family")) ex.generator.family = parse_family(f.family);
    if (f.given("variant")) ex.generator.variant = parse_ratio_variant(f.variant);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (f.given("n")) ex.generator.n = f.n;
  if (f.given("m")) ex.generator.m = f.m;
  if (f.given("p")) ex.generator.p = f.p;
  if (f.given("radius")) ex.generator.radius = f.radius;
  if (f.given("sigma")) ex.generator.noise_sigma = f.sigma;
  if (f.given("budget")) ex.generator.budget = f.budget;
  if (f.given("floor")) ex.generator.floor = f.floor;
  if (f.given("seed")) ex.generator.seed = f.seed;

  SolverConfig base;
  FBarSpec fbar;
  try {
    base = solver_config_from_json(file.value("solver", nlohmann::json::object()));
    if (file.contains("fbar")) fbar = parse_fbar(file.at("fbar").get<std::string>());
    if (f.given("fbar")) fbar = parse_fbar(f.fbar);
    if (f.given("eps")) base.epsilon = f.eps;
    if (f.given("C")) base.fbar.big_c = f.big_c;
    if (f.given("gamma0")) base.gamma0 = f.gamma0;
    if (f.given("iters")) base.max_iters = f.iters;
    if (f.given("aggregation")) base.aggregation = parse_aggregation(f.aggregation);
    if (f.given("record-points")) base.record_points = f.record_points;
    if (f.given("early-stop")) base.early_stop = f.early_stop;
    base.seed = ex.generator.seed;

    std::vector<std::string> algos;
    if (compare) {
      if (f.given("algos"))
        algos = split_list(f.algos);
      else if (file.contains("algos"))
        algos = file.at("algos").get<std::vector<std::string>>();
    } else {
      if (f.given("algo"))
        algos = {f.algo};
      else
        algos = {to_string(base.algorithm)};
    }
    std::map<std::string, int> seen;
    for (const std::string& a : algos) {
      SolverSpec s;
      s.config = base;
      s.config.algorithm = parse_algorithm(a);
      s.fbar = fbar;
      s.label = to_string(s.config.algorithm);
      if (seen[s.label]++ > 0) s.label += "_" + std::to_string(seen[s.label]);
      ex.solvers.push_back(std::move(s));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  if (f.given("out"))
    ex.output_dir = f.out;
  else if (file.contains("out"))
    ex.output_dir = file.at("out").get<std::string>();
  else if (const char* env = std::getenv("SHARP_SUBGRAD_OUT"); env && *env)
    ex.output_dir = env;
  else
    ex.output_dir = "results";

  std::vector<std::string> emit;
  if (f.given("emit"))
    emit = split_list(f.emit);
  else if (file.contains("emit"))
    emit = file.at("emit").get<std::vector<std::string>>();
  else
    emit = {"trace_csv", "summary_json", "instance_json"};
  ex.emit = {emit.begin(), emit.end()};

  const std::string scale = f.given("scale") ? f.scale : file.value("scale", std::string("desk"));
  if (scale != "desk" && scale != "full") throw ConfigError("--scale must be desk or full");
  ex.full_scale = scale == "full";
  return ex;
}

}  // namespace

int main_entry(const std::vector<std::string>& args) {
  CLI::App app{"Switching subgradient methods with Polyak steps for constrained sharp problems"};
  app.require_subcommand(1);
  SharedFlags run_flags, cmp_flags;
  CLI::App* run = app.add_subcommand("run", "generate an instance and run one solver");
  run_flags.add(run, false);
  CLI::App* cmp = app.add_subcommand("compare", "run several solvers on one instance");
  cmp_flags.add(cmp, true);

  std::string dir, trace_path, points_path, instance_path, summary_path, verify_out;
  double tol = 1e-9;
  CLI::App* ver = app.add_subcommand("verify", "replay the step inequalities of a recorded run");
  ver->add_option("--dir", dir, "directory holding trace.csv, points.csv, instance.json, summary.json");
  ver->add_option("--trace", trace_path, "trace csv");
  ver->add_option("--points", points_path, "points csv");
  ver->add_option("--instance", instance_path, "instance json");
  ver->add_option("--summary", summary_path, "summary json");
  ver->add_option("--out", verify_out, "verify json output path");
  ver->add_option("--tol", tol, "relative tolerance");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(build_experiment(run_flags, false));
    if (cmp->parsed()) return cmd_compare(build_experiment(cmp_flags, true));
    VerifyInputs in;
    const fs::path base = dir;
    in.trace_csv = trace_path.empty() ? base / "trace.csv" : fs::path(trace_path);
    in.points_csv = points_path.empty() ? base / "points.csv" : fs::path(points_path);
    in.instance_json = instance_path.empty() ? base / "instance.json" : fs::path(instance_path);
    if (!summary_path.empty())
      in.summary_json = summary_path;
    else if (!dir.empty())
      in.summary_json = base / "summary.json";
    in.verify_json = verify_out.empty() ? in.trace_csv.parent_path() / "verify.json" : fs::path(verify_out);
    in.tol = tol;
    return cmd_verify(in);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  } catch (const std::exception& e) {
    return report_exception(e);
  }
}

}  // namespace sharp_subgrad::cli
