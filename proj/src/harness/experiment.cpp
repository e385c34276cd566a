#include "col/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "col/imitation.hpp"

namespace col::harness {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void only_params(const Json& j, const std::string& family, std::initializer_list<const char*> keys) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail("unknown parameter '" + k + "' for family " + family);
  }
}

double num(const Json& j, const char* key, std::optional<double> def = std::nullopt) {
  if (!j.contains(key)) {
    if (def) return *def;
    fail(std::string("missing problem parameter '") + key + "'");
  }
  if (!j.at(key).is_number()) fail(std::string("problem parameter '") + key + "' must be a number");
  return j.at(key).get<double>();
}

Vector vec_or_zero(const Json& j, const char* key, Index d) {
  if (!j.contains(key)) return Vector::Zero(d);
  Vector v = vector_from_json(j.at(key), std::string("problem.params.") + key);
  if (v.size() != d) fail(std::string("problem parameter '") + key + "' has the wrong dimension");
  return v;
}

DecisionSet need_set(const Json& j) {
  if (!j.contains("set")) fail("missing problem parameter 'set'");
  return set_from_json(j.at("set"));
}

std::shared_ptr<const Bifunction> build_unchecked(const ProblemConfig& p) {
  const Json& j = p.params;
  const std::string& fam = p.family;
  if (fam == "quadratic_tracking") {
    only_params(j, fam, {"alpha", "lambda", "c", "set"});
    const DecisionSet set = need_set(j);
    return std::make_shared<Bifunction>(
        make_quadratic_tracking(num(j, "alpha"), num(j, "lambda"), vec_or_zero(j, "c", set.dim()), set));
  }
  if (fam == "linear_tracking") {
    only_params(j, fam, {"alpha", "Q", "c", "set"});
    const DecisionSet set = need_set(j);
    if (!j.contains("Q")) fail("missing problem parameter 'Q'");
    return std::make_shared<Bifunction>(make_linear_tracking(
        num(j, "alpha"), matrix_from_json(j.at("Q"), "problem.params.Q"), vec_or_zero(j, "c", set.dim()), set));
  }
  if (fam == "rotation") {
    only_params(j, fam, {"alpha", "angle_deg", "radius"});
    return std::make_shared<Bifunction>(make_rotation(
        num(j, "alpha", 1.0), num(j, "angle_deg", 30.0) * std::numbers::pi / 180.0, num(j, "radius", 1.0)));
  }
  if (fam == "reflected_expansion") {
    only_params(j, fam, {});
    return std::make_shared<Bifunction>(make_reflected_expansion());
  }
  if (fam == "convex_opt") {
    only_params(j, fam, {"a", "set"});
    const DecisionSet set = need_set(j);
    return std::make_shared<Bifunction>(make_convex_opt(squared_distance(vec_or_zero(j, "a", set.dim()), set), set));
  }
  if (fam == "matrix_game") {
    only_params(j, fam, {"A"});
    if (!j.contains("A")) fail("missing problem parameter 'A'");
    return std::make_shared<Bifunction>(make_matrix_game(matrix_from_json(j.at("A"), "problem.params.A")));
  }
  if (fam == "linear_vi") {
    only_params(j, fam, {"M", "q", "set"});
    const DecisionSet set = need_set(j);
    if (!j.contains("M")) fail("missing problem parameter 'M'");
    return std::make_shared<Bifunction>(make_linear_vi(matrix_from_json(j.at("M"), "problem.params.M"),
                                                       vec_or_zero(j, "q", set.dim()), set));
  }
  if (fam == "imitation") {
    only_params(j, fam, {"S", "A", "H", "mdp_seed", "mdp_file", "expert_seed", "mu", "groups",
                         "beta_samples", "beta_seed", "beta_inflation"});
    TabularMDP mdp;
    if (j.contains("mdp_file")) {
      mdp = TabularMDP::load(j.at("mdp_file").get<std::string>());
    } else {
      mdp = random_mdp(static_cast<int>(num(j, "S", 3)), static_cast<int>(num(j, "A", 2)),
                       static_cast<int>(num(j, "H", 5)), static_cast<std::uint64_t>(num(j, "mdp_seed", 0)));
    }
    const PolicyMatrix expert =
        random_policy(mdp.S, mdp.A, static_cast<std::uint64_t>(num(j, "expert_seed", 1)));
    ILOptions opt;
    opt.mu = num(j, "mu", 1.0);
    if (j.contains("groups")) opt.groups = j.at("groups").get<std::vector<int>>();
    opt.beta_samples = static_cast<int>(num(j, "beta_samples", opt.beta_samples));
    opt.beta_seed = static_cast<std::uint64_t>(num(j, "beta_seed", static_cast<double>(opt.beta_seed)));
    opt.beta_inflation = num(j, "beta_inflation", opt.beta_inflation);
    return std::make_shared<Bifunction>(make_il_problem(mdp, expert, opt));
  }
  fail("unknown problem family '" + fam +
       "' (expected quadratic_tracking|linear_tracking|rotation|reflected_expansion|convex_opt|"
       "matrix_game|linear_vi|imitation)");
}

}  // namespace

std::shared_ptr<const Bifunction> build_problem(const ProblemConfig& p) {
  try {
    return build_unchecked(p);
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    fail("problem: " + std::string(e.what()));
  } catch (const Error& e) {
    fail("problem: " + std::string(e.what()));
  }
}

StepSchedule resolve_step(const StepConfig& s, const Regularity& reg, const BregmanGeometry& geom) {
  if (s.type == "constant") return StepSchedule::constant(s.eta);
  if (s.type == "inverse_sqrt") return StepSchedule::inverse_sqrt(s.eta);
  if (s.type == "md_optimal" || s.type == "md_optimal_sqrt") {
    if (!(reg.alpha > reg.beta)) fail("step " + s.type + " needs alpha > beta");
    const double eta = mirror_descent_optimal_step(reg, geom);
    return s.type == "md_optimal" ? StepSchedule::constant(eta) : StepSchedule::inverse_sqrt(eta);
  }
  if (s.type == "predictable") return StepSchedule::constant(predictable_step(reg, geom));
  fail("unknown step type '" + s.type + "'");
}

std::uint64_t cell_seed(std::uint64_t master, std::uint64_t seed, std::size_t algorithm_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(algorithm_index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

struct Prepared {
  std::shared_ptr<const Bifunction> f;
  Environment env;
  std::vector<RunSpec> specs;  // one per algorithm, seed filled per cell
};

Prepared prepare(const ExperimentConfig& c) {
  Prepared p;
  p.f = build_problem(c.problem);
  if (c.drift) {
    p.env = Environment::predictable(make_predictable(p.f, c.drift->schedule, c.drift->seed, c.horizon));
  } else {
    p.env = Environment::col(p.f);
  }
  for (const auto& a : c.algorithms) {
    RunSpec s;
    s.kind = a.kind;
    s.geometry = a.geometry;
    try {
      s.schedule = resolve_step(a.step, p.f->reg, a.geometry);
    } catch (const InvalidArgument& e) {
      fail(a.label + ": " + e.what());
    }
    if (a.kind == AlgorithmKind::kLambdaTrap) {
      if (a.trap_lambda) {
        s.trap_lambda = *a.trap_lambda;
      } else {
        if (!(p.f->reg.alpha > 0.0)) fail(a.label + ": trap_lambda auto needs alpha > 0");
        s.trap_lambda = p.f->reg.beta / p.f->reg.alpha;
      }
    }
    s.feedback = c.feedback;
    s.horizon = c.horizon;
    s.initial = c.initial_point;
    s.oracle_tol = c.oracle.tol;
    s.problem_id = c.problem.family;
    s.algorithm_id = a.label;
    try {
      validate_run(p.env, s);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(a.label + ": " + e.what());
    }
    p.specs.push_back(std::move(s));
  }
  return p;
}

std::string trace_name(const std::string& label, std::uint64_t seed) {
  return label + "_seed" + std::to_string(seed) + ".csv";
}

std::string opt_str(const std::optional<double>& v) { return format_double(v.value_or(std::nan(""))); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::vector<double> round_axis(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
  return x;
}

}  // namespace

void validate_experiment(const ExperimentConfig& config) { prepare(config); }

bool ExperimentResult::ok() const {
  return std::none_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.error.has_value(); });
}

ExperimentResult run_experiment(ExperimentConfig config, const std::string& output_dir,
                                const RunOptions& opts) {
  if (opts.apply_env_seed) apply_seed_override(config);
  const Prepared prep = prepare(config);

  ExperimentResult result;
  result.config = config;
  result.output_dir = output_dir.empty() ? config.output_dir : output_dir;

  if (!config.drift) {
    try {
      result.equilibrium = find_equilibrium(*prep.f, 1e-10, 100000,
                                            std::min<Index>(config.oracle.grid_points_per_dim, 21));
    } catch (const NoCertifiedRoute&) {
    } catch (const ConvergenceFailure&) {
    } catch (const GridUnsupported&) {
    }
  }

  if (opts.write_files) {
    fs::create_directories(result.output_dir);
    save_config(config, (fs::path(result.output_dir) / "config.json").string());
  }

  struct Job {
    std::size_t alg;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::uint64_t s : config.seeds) {
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) jobs.push_back({a, s});
  }
  result.cells.resize(jobs.size());

  auto work = [&](std::size_t idx) {
    const Job& job = jobs[idx];
    CellResult& cell = result.cells[idx];
    cell.algorithm = config.algorithms[job.alg].label;
    cell.seed = job.seed;
    cell.trace_file = trace_name(cell.algorithm, job.seed);
    try {
      RunSpec spec = prep.specs[job.alg];
      spec.seed = cell_seed(config.master_seed, job.seed, job.alg);
      spec.equilibrium = result.equilibrium;
      auto trace = std::make_shared<RunTrace>(run(prep.env, spec));
      trace->seed = job.seed;
      cell.rounds = trace->size();
      cell.dynamic_regret_cum.reserve(trace->rows.size());
      cell.static_regret_cum.reserve(trace->rows.size());
      for (const auto& r : trace->rows) {
        cell.dynamic_regret_cum.push_back(r.dynamic_regret_cum);
        cell.static_regret_cum.push_back(r.static_regret_cum);
      }
      cell.dynamic_regret = cell.dynamic_regret_cum.back();
      cell.static_regret = cell.static_regret_cum.back();
      cell.slope = last_decade_slope(round_axis(cell.dynamic_regret_cum.size()), cell.dynamic_regret_cum).slope;
      if (result.equilibrium && !prep.env.has_drift()) {
        cell.upper_margin =
            check_theorem_bounds(*trace, *prep.f, BoundKind::kDynamicRegretUpper).min_slack;
        cell.lower_margin =
            check_theorem_bounds(*trace, *prep.f, BoundKind::kDynamicRegretLower).min_slack;
      }
      if (opts.write_files) trace->write_csv((fs::path(result.output_dir) / cell.trace_file).string());
      if (opts.keep_traces) cell.trace = trace;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
    });
  }
  for (auto& t : pool) t.join();

  if (opts.write_files) {
    std::ofstream os((fs::path(result.output_dir) / "summary.csv").string(), std::ios::binary);
    if (!os) throw Error("cannot write summary.csv in '" + result.output_dir + "'");
    os << summary_csv(result);
  }
  return result;
}

std::vector<double> mean_curve(const std::vector<CellResult>& cells, const std::string& algorithm,
                               bool dynamic) {
  std::vector<double> acc;
  std::size_t count = 0;
  for (const auto& c : cells) {
    if (c.algorithm != algorithm || c.error) continue;
    const auto& v = dynamic ? c.dynamic_regret_cum : c.static_regret_cum;
    if (acc.empty()) acc.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < acc.size() && i < v.size(); ++i) acc[i] += v[i];
    ++count;
  }
  for (auto& x : acc) x /= static_cast<double>(std::max<std::size_t>(count, 1));
  return acc;
}

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream os;
  const std::string eq = r.equilibrium ? r.equilibrium->method_name() : "none";
  os << "algorithm,seed,rounds,dynamic_regret,static_regret,slope_dynamic,upper_bound_margin,"
        "lower_bound_margin,equilibrium,error\n";
  for (const auto& c : r.cells) {
    os << csv_escape(c.algorithm) << ',' << c.seed << ',' << c.rounds << ','
       << format_double(c.dynamic_regret) << ',' << format_double(c.static_regret) << ','
       << format_double(c.slope) << ',' << opt_str(c.upper_margin) << ',' << opt_str(c.lower_margin)
       << ',' << eq << ',' << csv_escape(c.error.value_or("")) << '\n';
  }
  for (const auto& a : r.config.algorithms) {
    const auto dyn = mean_curve(r.cells, a.label, true);
    const auto sta = mean_curve(r.cells, a.label, false);
    if (dyn.empty()) continue;
    os << csv_escape(a.label) << ",mean," << dyn.size() << ',' << format_double(dyn.back()) << ','
       << format_double(sta.back()) << ','
       << format_double(last_decade_slope(round_axis(dyn.size()), dyn).slope) << ",nan,nan," << eq
       << ",\n";
  }
  return os.str();
}

std::string summarize_directory(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InvalidArgument("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv" && e.path().filename() != "summary.csv") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidArgument("no trace CSVs in '" + dir + "'");
  std::ostringstream os;
  os << "file,rounds,dynamic_regret,static_regret,slope_dynamic\n";
  for (const auto& p : files) {
    const TraceTable t = read_trace_csv(p.string());
    const auto n = t.column("n");
    const auto dyn = t.column("dynamic_regret_cum");
    const auto sta = t.column("static_regret_cum");
    os << csv_escape(p.filename().string()) << ',' << t.rows.size() << ','
       << format_double(dyn.empty() ? 0.0 : dyn.back()) << ','
       << format_double(sta.empty() ? 0.0 : sta.back()) << ','
       << format_double(last_decade_slope(n, dyn).slope) << '\n';
  }
  return os.str();
}

}  // namespace col::harness
