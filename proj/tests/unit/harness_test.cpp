#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "col/errors.hpp"
#include "col/harness/experiment.hpp"
#include "col/trace.hpp"
#include "util.hpp"

using namespace col;
using namespace col::harness;
namespace fs = std::filesystem;

namespace {

Json base_tree() {
  return Json::parse(R"({
    "version": 1, "name": "unit",
    "problem": {"family": "quadratic_tracking",
                "params": {"alpha": 2, "lambda": 0.5, "c": [0, 0],
                           "set": {"type": "cube", "dim": 2, "lo": -1, "hi": 1}}},
    "algorithms": [{"kind": "mirror_descent", "label": "md_const", "step": {"type": "constant", "eta": 0.1}},
                   {"kind": "mirror_descent", "step": {"type": "inverse_sqrt", "eta": 1}}],
    "feedback": {"mode": "stochastic", "sigma": 0.5},
    "horizon": 200, "seeds": [0, 1, 2], "initial_point": [1, 0]
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("col_harness_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config round-trips through its canonical form") {
  Json t = base_tree();
  t["feedback"] = Json::parse(R"({"mode": "deterministic"})");
  const ExperimentConfig c = config_from_json(t);
  const Json canon = config_to_json(c);
  CHECK(config_to_json(config_from_json(canon)) == canon);
  CHECK(canon["version"] == kConfigVersion);
}

TEST_CASE("schema errors name the offending key") {
  Json t = base_tree();
  t["horizn"] = 5;
  try {
    config_from_json(t);
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("horizn") != std::string::npos);
  }
  Json v = base_tree();
  v["version"] = 99;
  CHECK_THROWS_AS(config_from_json(v), ConfigError);
}

TEST_CASE("empty seeds are rejected") {
  Json t = base_tree();
  t["seeds"] = Json::array();
  CHECK_THROWS_AS(validate_experiment(config_from_json(t)), ConfigError);
}

TEST_CASE("entropy geometry on a box is rejected before running") {
  Json t = base_tree();
  t["algorithms"][1]["geometry"] = "entropy";
  const fs::path out = fresh("entropy");
  CHECK_THROWS_AS(run_experiment(config_from_json(t), out.string()), ConfigError);
  CHECK_FALSE(fs::exists(out / "summary.csv"));
}

TEST_CASE("functional algorithms refuse noisy feedback") {
  Json t = base_tree();
  t["algorithms"] = Json::parse(R"([{"kind": "midpoint"}])");
  CHECK_THROWS_AS(validate_experiment(config_from_json(t)), ConfigError);
}

TEST_CASE("two algorithms and three seeds give six traces and a summary") {
  const fs::path out = fresh("cells");
  RunOptions o;
  o.apply_env_seed = false;
  const ExperimentResult r = run_experiment(config_from_json(base_tree()), out.string(), o);
  CHECK(r.ok());
  CHECK(r.cells.size() == 6u);
  int csv = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".csv" && e.path().filename() != "summary.csv") ++csv;
  CHECK(csv == 6);
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "config.json"));
  const TraceTable t = read_trace_csv((out / "md_const_seed0.csv").string());
  CHECK(t.columns == trace_csv_columns(2));
  CHECK(t.rows.size() == 200u);
  fs::remove_all(out);
}

TEST_CASE("trace header is the published schema") {
  CHECK(trace_csv_header(2) == "n,x_0,x_1,loss,gap,delta,xi_norm,static_regret_cum,dynamic_regret_cum");
}

TEST_CASE("a permuted header is rejected") {
  const fs::path out = fresh("permuted");
  fs::create_directories(out);
  std::ofstream(out / "bad.csv") << "n,x_0,x_1,gap,loss,delta,xi_norm,static_regret_cum,dynamic_regret_cum\n1,0,0,0,0,,0,0,0\n";
  CHECK_THROWS(read_trace_csv((out / "bad.csv").string()));
  fs::remove_all(out);
}

TEST_CASE("reruns from the persisted config are byte-identical and independent of workers") {
  const fs::path a = fresh("rep_a"), b = fresh("rep_b");
  RunOptions o;
  o.apply_env_seed = false;
  Json t = base_tree();
  t["workers"] = 1;
  run_experiment(config_from_json(t), a.string(), o);
  ExperimentConfig again = load_config((a / "config.json").string());
  again.workers = 3;
  run_experiment(again, b.string(), o);
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("cell seeds depend only on their coordinates") {
  CHECK(cell_seed(5, 1, 0) == cell_seed(5, 1, 0));
  CHECK(cell_seed(5, 1, 0) != cell_seed(5, 1, 1));
  CHECK(cell_seed(5, 1, 0) != cell_seed(6, 1, 0));
  CHECK(cell_seed(5, 1, 0) != cell_seed(5, 2, 0));
}

TEST_CASE("COL_SEED overrides the master seed") {
  ExperimentConfig c = config_from_json(base_tree());
  ::setenv("COL_SEED", "77", 1);
  apply_seed_override(c);
  ::unsetenv("COL_SEED");
  CHECK(c.master_seed == 77u);
  ::setenv("COL_SEED", "abc", 1);
  CHECK_THROWS_AS(apply_seed_override(c), ConfigError);
  ::unsetenv("COL_SEED");
}

TEST_CASE("dotted keys edit a config tree") {
  Json t = base_tree();
  set_dotted(t, "problem.params.lambda", "0.2");
  set_dotted(t, "horizon", "10");
  set_dotted(t, "name", "swept");
  CHECK(t["problem"]["params"]["lambda"] == 0.2);
  CHECK(t["horizon"] == 10);
  CHECK(t["name"] == "swept");
}

TEST_CASE("summary statistics are recomputable from the traces") {
  const fs::path out = fresh("summary");
  RunOptions o;
  o.apply_env_seed = false;
  const ExperimentResult r = run_experiment(config_from_json(base_tree()), out.string(), o);
  const std::string offline = summarize_directory(out.string());
  for (const auto& c : r.cells) {
    std::ostringstream line;
    line << c.trace_file << "," << c.rounds << "," << format_double(c.dynamic_regret) << ","
         << format_double(c.static_regret) << "," << format_double(c.slope);
    CAPTURE(line.str());
    CHECK(offline.find(line.str()) != std::string::npos);
  }
  fs::remove_all(out);
}

TEST_CASE("every problem family builds") {
  for (const char* p : {
           R"({"family": "rotation", "params": {}})",
           R"({"family": "reflected_expansion", "params": {}})",
           R"({"family": "convex_opt", "params": {"a": [0.2], "set": {"type": "cube", "dim": 1, "lo": -1, "hi": 1}}})",
           R"({"family": "matrix_game", "params": {"A": [[1, -1], [-1, 1]]}})",
           R"({"family": "linear_vi", "params": {"M": [[1, 2], [-2, 1]], "q": [0.1, 0], "set": {"type": "ball", "center": [0, 0], "radius": 1}}})",
           R"({"family": "imitation", "params": {"S": 3, "A": 2, "H": 5}})",
           R"({"family": "linear_tracking", "params": {"alpha": 1, "Q": [[0.5]], "c": [0.1], "set": {"type": "box", "lower": [-1], "upper": [1]}}})"}) {
    CAPTURE(p);
    const Json j = Json::parse(p);
    ProblemConfig pc{j["family"], j["params"]};
    CHECK(build_problem(pc) != nullptr);
  }
  ProblemConfig bad{"nope", Json::object()};
  CHECK_THROWS_AS(build_problem(bad), ConfigError);
}

TEST_CASE("step types resolve against the problem constants") {
  const Regularity reg = Regularity::certified(2.0, 1.0, 2.0, 4.0);
  const auto E = BregmanGeometry::euclidean();
  CHECK(resolve_step({"constant", 0.3}, reg, E).at(9) == 0.3);
  CHECK(resolve_step({"inverse_sqrt", 2.0}, reg, E).at(4) == doctest::Approx(1.0));
  // (alpha - beta) / (gamma + beta)^2 = 1/9
  CHECK(resolve_step({"md_optimal", 0.0}, reg, E).at(7) == doctest::Approx(1.0 / 9.0));
  CHECK(resolve_step({"md_optimal_sqrt", 0.0}, reg, E).at(4) == doctest::Approx(1.0 / 18.0));
  // alpha / (2 L gamma^2)
  CHECK(resolve_step({"predictable", 0.0}, reg, E).at(1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(resolve_step({"md_optimal", 0.0}, Regularity::certified(1.0, 1.0, 1.0, 1.0), E), ConfigError);
}
