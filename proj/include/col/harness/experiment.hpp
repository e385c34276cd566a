#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "col/harness/config.hpp"
#include "col/metrics.hpp"

namespace col::harness {

/// Instantiates the configured problem family.
std::shared_ptr<const Bifunction> build_problem(const ProblemConfig& p);

/// Resolves a step config against the problem's constants.
StepSchedule resolve_step(const StepConfig& s, const Regularity& reg, const BregmanGeometry& geom);

/// Seed of cell (seed, algorithm index); independent of scheduling order.
std::uint64_t cell_seed(std::uint64_t master, std::uint64_t seed, std::size_t algorithm_index);

struct CellResult {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string trace_file;  // relative to the output directory
  std::optional<std::string> error;
  long rounds = 0;
  double dynamic_regret = 0.0;
  double static_regret = 0.0;
  double slope = 0.0;  // last-decade log-log slope of cumulative dynamic regret
  std::optional<double> upper_margin;
  std::optional<double> lower_margin;
  std::vector<double> dynamic_regret_cum;
  std::vector<double> static_regret_cum;
  std::shared_ptr<RunTrace> trace;  // kept only on request
};

struct ExperimentResult {
  ExperimentConfig config;  // as persisted, with the seed override applied
  std::string output_dir;
  std::optional<EquilibriumCertificate> equilibrium;
  std::vector<CellResult> cells;
  bool ok() const;
};

struct RunOptions {
  bool keep_traces = false;
  bool write_files = true;
  bool apply_env_seed = true;
};

/// Validates everything, then runs every (algorithm, seed) cell, writing one
/// trace CSV per cell, summary.csv and config.json into `output_dir`
/// (config.output_dir when empty).
ExperimentResult run_experiment(ExperimentConfig config, const std::string& output_dir = "",
                                const RunOptions& opts = {});

/// Throws ConfigError when the experiment would be rejected.
void validate_experiment(const ExperimentConfig& config);

/// Mean across cells of one algorithm at every round.
std::vector<double> mean_curve(const std::vector<CellResult>& cells, const std::string& algorithm,
                               bool dynamic = true);

/// Header and rows of summary.csv.
std::string summary_csv(const ExperimentResult& r);

/// Recomputes per-trace statistics from the CSV files in a directory.
std::string summarize_directory(const std::string& dir);

}  // namespace col::harness
