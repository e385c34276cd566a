#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "col/errors.hpp"
#include "col/harness/experiment.hpp"
#include "col/harness/suites.hpp"

namespace fs = std::filesystem;
using namespace col;
using namespace col::harness;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kCheckFailed = 2;

void print_cells(const ExperimentResult& r) {
  for (const auto& c : r.cells) {
    std::cout << c.algorithm << " seed=" << c.seed;
    if (c.error) {
      std::cout << "  ERROR " << *c.error << '\n';
      continue;
    }
    std::cout << "  rounds=" << c.rounds << " dynamic_regret=" << c.dynamic_regret
              << " static_regret=" << c.static_regret << " slope=" << c.slope << '\n';
  }
}

int do_run(const std::string& config_path, const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  const ExperimentResult r = run_experiment(cfg, out);
  print_cells(r);
  std::cout << "wrote " << r.cells.size() << " traces to " << r.output_dir << '\n';
  return r.ok() ? kOk : kCheckFailed;
}

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

GridAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
    throw ConfigError("grid axis must look like key=v1,v2,...: '" + spec + "'");
  GridAxis a{spec.substr(0, eq), {}};
  std::string rest = spec.substr(eq + 1);
  // Split on commas outside brackets so vector values like [1,2] survive.
  int depth = 0;
  std::string cur;
  for (char ch : rest) {
    if (ch == '[' || ch == '{') ++depth;
    if (ch == ']' || ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      a.values.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  a.values.push_back(cur);
  for (const auto& v : a.values)
    if (v.empty()) throw ConfigError("empty value in grid axis '" + spec + "'");
  return a;
}

std::string sanitize(const std::string& s) {
  std::string o;
  for (char c : s) o += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
  return o;
}

int do_sweep(const std::string& config_path, const std::vector<std::string>& grid_specs,
             const std::string& out) {
  std::vector<GridAxis> axes;
  for (const auto& g : grid_specs) axes.push_back(parse_axis(g));
  const ExperimentConfig base = load_config(config_path);
  const Json tree = config_to_json(base);
  const std::string root = out.empty() ? base.output_dir : out;

  // Build and validate every point before running any of them.
  std::vector<std::pair<std::string, ExperimentConfig>> points;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    Json t = tree;
    std::string name;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      set_dotted(t, axes[i].key, axes[i].values[idx[i]]);
      name += (name.empty() ? "" : "__") + sanitize(axes[i].key) + "=" + sanitize(axes[i].values[idx[i]]);
    }
    ExperimentConfig c = config_from_json(t);
    validate_experiment(c);
    points.emplace_back(name.empty() ? "base" : name, std::move(c));
    std::size_t k = 0;
    while (k < axes.size() && ++idx[k] == axes[k].values.size()) idx[k++] = 0;
    if (k == axes.size()) break;
  }

  bool ok = true;
  for (const auto& [name, cfg] : points) {
    std::cout << "== " << name << '\n';
    const ExperimentResult r = run_experiment(cfg, (fs::path(root) / name).string());
    print_cells(r);
    ok = ok && r.ok();
  }
  return ok ? kOk : kCheckFailed;
}

int do_check(const std::string& suite) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else {
    names = {suite};
  }
  bool ok = true;
  for (const auto& n : names) {
    const SuiteReport r = check_suite(n);
    std::cout << r.render();
    ok = ok && r.passed();
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous online learning experiments"};
  app.require_subcommand(1);

  std::string config, out, suite, dir;
  std::vector<std::string> grid;

  auto* run_cmd = app.add_subcommand("run", "Run every (algorithm, seed) cell of an experiment");
  run_cmd->add_option("--config", config, "experiment config (JSON)")->required();
  run_cmd->add_option("--out", out, "output directory (defaults to the config's output_dir)");

  auto* check_cmd = app.add_subcommand("check", "Run a property suite");
  check_cmd->add_option("--suite", suite, "suite name or 'all'")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config over a parameter grid");
  sweep_cmd->add_option("--config", config, "base experiment config")->required();
  sweep_cmd->add_option("--grid", grid, "key=v1,v2,... (repeatable; dotted keys)")->required();
  sweep_cmd->add_option("--out", out, "root output directory");

  auto* sum_cmd = app.add_subcommand("summarize", "Recompute statistics from trace CSVs");
  sum_cmd->add_option("--dir", dir, "directory of trace CSVs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (run_cmd->parsed()) return do_run(config, out);
    if (sweep_cmd->parsed()) return do_sweep(config, grid, out);
    if (check_cmd->parsed()) return do_check(suite);
    if (sum_cmd->parsed()) {
      std::cout << summarize_directory(dir);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
