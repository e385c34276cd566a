#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "col/algorithms.hpp"
#include "col/problems.hpp"

namespace col::harness {

using Json = nlohmann::json;

inline constexpr int kConfigVersion = 1;

/// A problem family name plus its parameters, kept as the JSON tree they came from.
struct ProblemConfig {
  std::string family;
  Json params = Json::object();
};

struct StepConfig {
  // constant | inverse_sqrt | md_optimal | md_optimal_sqrt | predictable
  // md_optimal_sqrt: the md_optimal step divided by sqrt(n)
  std::string type = "constant";
  double eta = 0.1;
};

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::kGreedy;
  std::string label;  // defaults to the kind name
  StepConfig step;
  BregmanGeometry geometry;
  std::optional<double> trap_lambda;  // empty: beta/alpha of the problem
};

struct DriftConfig {
  DriftSchedule schedule;
  std::uint64_t seed = 0;
};

struct OracleConfig {
  double tol = 1e-12;
  Index grid_points_per_dim = 41;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  std::string name = "experiment";
  ProblemConfig problem;
  std::vector<AlgorithmConfig> algorithms;
  FeedbackSpec feedback;
  long horizon = 1;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  std::optional<Vector> initial_point;
  std::optional<DriftConfig> drift;
  OracleConfig oracle;
  std::string output_dir = "out";
  int workers = 0;  // 0: hardware concurrency
};

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);
DecisionSet set_from_json(const Json& j);
Json set_to_json(const DecisionSet& s);

/// Parses and checks the schema. Throws ConfigError with the offending key.
ExperimentConfig config_from_json(const Json& j);
/// Canonical tree with every default spelled out; config_from_json inverts it.
Json config_to_json(const ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& c, const std::string& path);

/// Applies COL_SEED from the environment, if set.
void apply_seed_override(ExperimentConfig& c);

/// Sets a dotted key (e.g. `problem.params.lambda`, `horizon`) in a config tree.
/// The value is parsed as JSON when possible and taken as a string otherwise.
void set_dotted(Json& tree, const std::string& key, const std::string& value);

}  // namespace col::harness
