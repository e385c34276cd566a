#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "col/bregman.hpp"
#include "col/feedback.hpp"
#include "col/problems.hpp"
#include "col/trace.hpp"

namespace col {

enum class AlgorithmKind { kGreedy, kMann, kMirrorDescent, kMidpoint, kLambdaTrap };

AlgorithmKind parse_algorithm(const std::string& s);
std::string algorithm_name(AlgorithmKind k);
bool uses_functional_feedback(AlgorithmKind k);

/// eta_n = eta (constant) or eta_n = eta / sqrt(n) (inverse_sqrt).
struct StepSchedule {
  enum class Kind { kConstant, kInverseSqrt };
  Kind kind = Kind::kConstant;
  double eta = 0.1;

  static StepSchedule constant(double eta) { return {Kind::kConstant, eta}; }
  static StepSchedule inverse_sqrt(double scale = 1.0) { return {Kind::kInverseSqrt, scale}; }
  double at(long n) const;
  std::string describe() const;
};

/// Largest constant step with a contracting mirror-descent map, 2(a-b)/(L(g+b)^2).
double mirror_descent_step_limit(const Regularity& reg, const BregmanGeometry& geom);
/// Step minimizing the contraction factor, (a-b)/(L(g+b)^2).
double mirror_descent_optimal_step(const Regularity& reg, const BregmanGeometry& geom);
/// Per-step Bregman contraction factor 1 - 2 eta (a-b)/L + eta^2 (g+b)^2.
double mirror_descent_contraction(const Regularity& reg, const BregmanGeometry& geom, double eta);
/// Constant step for drifting problems, a/(2 L g^2).
double predictable_step(const Regularity& reg, const BregmanGeometry& geom);

struct AlgorithmState {
  Vector current;
  long round = 1;
  BregmanGeometry geometry;
  StepSchedule schedule;
};

// Single updates. Each advances state.round and returns the new iterate.
Vector greedy_step(AlgorithmState& s, const Bifunction& f, const Vector& tilt = Vector());
/// x <- eta_n x + (1 - eta_n) T(x); eta_n = 0 is greedy, eta_n = 1 keeps x.
Vector mann_step(AlgorithmState& s, const Bifunction& f, const Vector& tilt = Vector());
Vector mirror_descent_step(AlgorithmState& s, const Bifunction& f, const Vector& g);
Vector midpoint_step(AlgorithmState& s, const Bifunction& f, const Vector& tilt = Vector());
/// x <- (lambda x + T(x)) / (1 + lambda), one-dimensional problems only.
Vector lambda_trap_step(AlgorithmState& s, const Bifunction& f, double lambda,
                        const Vector& tilt = Vector());

struct RunSpec {
  AlgorithmKind kind = AlgorithmKind::kGreedy;
  StepSchedule schedule;
  BregmanGeometry geometry;
  double trap_lambda = 0.0;
  FeedbackSpec feedback;
  long horizon = 1;
  std::uint64_t seed = 0;
  std::optional<Vector> initial;  // default: center of the set
  double oracle_tol = tol::kOracle;
  std::optional<EquilibriumCertificate> equilibrium;
  std::string problem_id;
  std::string algorithm_id;
};

/// Checks everything run() would reject, before any round executes.
void validate_run(const Environment& env, const RunSpec& spec);

/// Plays `horizon` rounds and records the trace. Deterministic given the spec.
RunTrace run(const Environment& env, const RunSpec& spec);

}  // namespace col
