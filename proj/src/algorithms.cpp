#include "col/algorithms.hpp"

#include <cmath>
#include <sstream>

namespace col {

AlgorithmKind parse_algorithm(const std::string& s) {
  if (s == "greedy") return AlgorithmKind::kGreedy;
  if (s == "mann") return AlgorithmKind::kMann;
  if (s == "mirror_descent") return AlgorithmKind::kMirrorDescent;
  if (s == "midpoint") return AlgorithmKind::kMidpoint;
  if (s == "lambda_trap") return AlgorithmKind::kLambdaTrap;
  throw InvalidArgument("unknown algorithm '" + s +
                        "' (expected greedy|mann|mirror_descent|midpoint|lambda_trap)");
}

std::string algorithm_name(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::kGreedy: return "greedy";
    case AlgorithmKind::kMann: return "mann";
    case AlgorithmKind::kMirrorDescent: return "mirror_descent";
    case AlgorithmKind::kMidpoint: return "midpoint";
    case AlgorithmKind::kLambdaTrap: return "lambda_trap";
  }
  return "?";
}

bool uses_functional_feedback(AlgorithmKind k) { return k != AlgorithmKind::kMirrorDescent; }

double StepSchedule::at(long n) const {
  if (kind == Kind::kConstant) return eta;
  return eta / std::sqrt(static_cast<double>(n));
}

std::string StepSchedule::describe() const {
  std::ostringstream os;
  os << (kind == Kind::kConstant ? "constant(" : "inverse_sqrt(") << eta << ")";
  return os.str();
}

namespace {

double finite_smoothness(const BregmanGeometry& geom) {
  if (!geom.smoothness_bounded()) {
    throw InvalidArgument("certified step sizes need a mirror map with bounded smoothness");
  }
  return geom.smoothness();
}

}  // namespace

double mirror_descent_step_limit(const Regularity& reg, const BregmanGeometry& geom) {
  const double L = finite_smoothness(geom);
  return 2.0 * (reg.alpha - reg.beta) / (L * (reg.gamma + reg.beta) * (reg.gamma + reg.beta));
}

double mirror_descent_optimal_step(const Regularity& reg, const BregmanGeometry& geom) {
  const double L = finite_smoothness(geom);
  return (reg.alpha - reg.beta) / (L * (reg.gamma + reg.beta) * (reg.gamma + reg.beta));
}

double mirror_descent_contraction(const Regularity& reg, const BregmanGeometry& geom, double eta) {
  const double L = finite_smoothness(geom);
  const double s = reg.gamma + reg.beta;
  return 1.0 - 2.0 * eta * (reg.alpha - reg.beta) / L + eta * eta * s * s;
}

double predictable_step(const Regularity& reg, const BregmanGeometry& geom) {
  const double L = finite_smoothness(geom);
  if (!(reg.gamma > 0.0)) throw InvalidArgument("predictable step needs gamma > 0");
  return reg.alpha / (2.0 * L * reg.gamma * reg.gamma);
}

namespace {

Vector mann_combination(const Vector& x, const Vector& t, double eta) {
  return eta * x + (1.0 - eta) * t;
}

Vector trap_combination(const Vector& x, const Vector& t, double lambda) {
  return (lambda * x + t) / (1.0 + lambda);
}

void check_mann_eta(double eta, long n) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("mann: eta_" + std::to_string(n) + " = " + std::to_string(eta) +
                          " outside [0, 1]");
  }
}

}  // namespace

Vector greedy_step(AlgorithmState& s, const Bifunction& f, const Vector& tilt) {
  s.current = best_response(f, s.current, tilt);
  ++s.round;
  return s.current;
}

Vector mann_step(AlgorithmState& s, const Bifunction& f, const Vector& tilt) {
  const double eta = s.schedule.at(s.round);
  check_mann_eta(eta, s.round);
  s.current = mann_combination(s.current, best_response(f, s.current, tilt), eta);
  ++s.round;
  return s.current;
}

Vector mirror_descent_step(AlgorithmState& s, const Bifunction& f, const Vector& g) {
  s.current = mirror_step(s.geometry, f.set, s.current, g, s.schedule.at(s.round));
  ++s.round;
  return s.current;
}

Vector midpoint_step(AlgorithmState& s, const Bifunction& f, const Vector& tilt) {
  s.current = 0.5 * (s.current + best_response(f, s.current, tilt));
  ++s.round;
  return s.current;
}

Vector lambda_trap_step(AlgorithmState& s, const Bifunction& f, double lambda, const Vector& tilt) {
  if (f.dim() != 1) throw InvalidArgument("lambda_trap is defined for one-dimensional problems only");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda_trap: lambda must be >= 0");
  s.current = trap_combination(s.current, best_response(f, s.current, tilt), lambda);
  ++s.round;
  return s.current;
}

void validate_run(const Environment& env, const RunSpec& spec) {
  if (!env.f) throw InvalidArgument("run: no problem");
  const Bifunction& f = *env.f;
  if (spec.horizon < 1) throw InvalidArgument("run: horizon must be >= 1");
  if (env.has_drift() && static_cast<long>(env.tilts.size()) < spec.horizon) {
    throw InvalidArgument("run: drift path shorter than the horizon");
  }
  if (spec.initial) {
    if (spec.initial->size() != f.dim()) throw DimensionMismatch("run: initial point dimension");
    if (!spec.initial->allFinite()) throw InvalidArgument("run: initial point must be finite");
    if (!contains(f.set, *spec.initial, 1e-9)) throw OutsideSet("run: initial point outside the set");
  }
  if (spec.equilibrium && spec.equilibrium->x_star.size() != f.dim()) {
    throw DimensionMismatch("run: equilibrium dimension");
  }
  spec.feedback.validate(f);
  if (uses_functional_feedback(spec.kind) && !spec.feedback.deterministic()) {
    throw InvalidArgument("run: " + algorithm_name(spec.kind) +
                          " uses exact best responses and needs deterministic feedback");
  }
  switch (spec.kind) {
    case AlgorithmKind::kMann:
      if (spec.schedule.kind == StepSchedule::Kind::kConstant) {
        check_mann_eta(spec.schedule.eta, 1);
      } else if (!(spec.schedule.eta >= 0.0 && spec.schedule.eta <= 1.0)) {
        throw InvalidArgument("mann: inverse_sqrt scale must lie in [0, 1]");
      }
      break;
    case AlgorithmKind::kMirrorDescent:
      if (!(spec.schedule.eta > 0.0) || !std::isfinite(spec.schedule.eta)) {
        throw InvalidArgument("mirror_descent: step size must be > 0");
      }
      if (spec.geometry.kind == BregmanGeometry::Kind::kNegativeEntropy && !f.set.is_simplicial()) {
        throw InvalidArgument("mirror_descent: entropy geometry on " + f.set.describe());
      }
      break;
    case AlgorithmKind::kMidpoint:
      if (spec.geometry.kind != BregmanGeometry::Kind::kEuclidean) {
        throw InvalidArgument("midpoint: requires the Euclidean geometry");
      }
      break;
    case AlgorithmKind::kLambdaTrap:
      if (f.dim() != 1) throw InvalidArgument("lambda_trap: problem must be one-dimensional");
      if (!(spec.trap_lambda >= 0.0) || !std::isfinite(spec.trap_lambda)) {
        throw InvalidArgument("lambda_trap: lambda must be >= 0");
      }
      break;
    case AlgorithmKind::kGreedy:
      break;
  }
}

RunTrace run(const Environment& env, const RunSpec& spec) {
  validate_run(env, spec);
  const Bifunction& f = *env.f;

  RunTrace trace;
  trace.problem_id = spec.problem_id.empty() ? f.name : spec.problem_id;
  trace.algorithm_id = spec.algorithm_id.empty() ? algorithm_name(spec.kind) : spec.algorithm_id;
  trace.seed = spec.seed;
  trace.dim = f.dim();
  trace.equilibrium = spec.equilibrium;
  trace.rows.reserve(static_cast<std::size_t>(spec.horizon));

  Rng rng(spec.seed);
  AlgorithmState state{spec.initial ? project(f.set, *spec.initial) : center(f.set), 1,
                       spec.geometry, spec.schedule};
  auto cumulative = make_cumulative(f);
  double loss_sum = 0.0;
  double dynamic = 0.0;

  for (long n = 1; n <= spec.horizon; ++n) {
    const Vector tilt = env.tilt(n);
    const Vector x = state.current;
    const Vector xs = best_response(f, x, tilt, spec.oracle_tol);

    TraceRow row;
    row.n = n;
    row.x = x;
    row.best_response = xs;
    row.tilt = tilt;
    row.loss = round_loss(f, x, tilt, x);
    row.gap = row.loss - round_loss(f, x, tilt, xs);
    row.drift = env.drift_at(n);
    if (spec.equilibrium) row.delta = (x - spec.equilibrium->x_star).norm();

    loss_sum += row.loss;
    dynamic += row.gap;
    cumulative->add(x, tilt, 1.0);
    row.static_regret_cum = loss_sum - cumulative->min_value();
    row.dynamic_regret_cum = dynamic;

    switch (spec.kind) {
      case AlgorithmKind::kGreedy:
        state.current = xs;
        break;
      case AlgorithmKind::kMann:
        state.current = mann_combination(x, xs, state.schedule.at(n));
        break;
      case AlgorithmKind::kMidpoint:
        state.current = 0.5 * (x + xs);
        break;
      case AlgorithmKind::kLambdaTrap:
        state.current = trap_combination(x, xs, spec.trap_lambda);
        break;
      case AlgorithmKind::kMirrorDescent: {
        const FeedbackSample fb = first_order_feedback(f, spec.feedback, n, x, tilt, rng);
        row.xi_norm = fb.xi_norm;
        state.current = mirror_step(state.geometry, f.set, x, fb.g, state.schedule.at(n));
        break;
      }
    }
    state.round = n + 1;
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

}  // namespace col
