#pragma once

#include <memory>
#include <string>
#include <vector>

#include "col/bifunction.hpp"

namespace col {

/// f_x(x') = (alpha/2) |x' - Q x - c|^2 with certified alpha, beta = alpha |Q|_2,
/// gamma = alpha and best response project(Q x + c - t/alpha).
Bifunction make_linear_tracking(double alpha, const Matrix& Q, const Vector& c,
                                const DecisionSet& set, std::string name = "linear_tracking");

/// Linear tracking with Q = lambda I.
Bifunction make_quadratic_tracking(double alpha, double lambda, const Vector& c,
                                   const DecisionSet& set);

/// Linear tracking with Q a planar rotation, c = 0, on Ball{0, radius}. alpha = beta.
Bifunction make_rotation(double alpha, double angle_rad, double radius);

/// 1-D linear tracking T(x) = clip(-2x + 0.6) on [-1, 1], alpha = 1, equilibrium 0.2.
Bifunction make_reflected_expansion();

/// Convex function h with what the equilibrium constructions need.
struct ConvexFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  // argmin over the set of h(x) + <t, x>.
  std::function<Vector(const Vector& t)> tilted_minimizer;
  double modulus = 0.0;     // strong convexity
  double smoothness = 0.0;  // Lipschitz constant of grad h
};

/// h(x) = |x - a|^2 restricted to `set`.
ConvexFunction squared_distance(const Vector& a, const DecisionSet& set);

/// Phi(x, x') = h(x') - h(x).
Bifunction make_convex_opt(const ConvexFunction& h, const DecisionSet& set);

/// Phi((u,v),(u',v')) = u'^T A v - u^T A v' on Simplex(m) x Simplex(k).
Bifunction make_matrix_game(const Matrix& A);

/// Phi(x, x') = <M x + q, x' - x>. M must have a positive semidefinite symmetric part.
Bifunction make_linear_vi(const Matrix& M, const Vector& q, const DecisionSet& set);

/// Per-round drift magnitudes a_n = scale * s(n).
struct DriftSchedule {
  enum class Kind { kZero, kInverseSquare, kInverseSqrt, kConstant };
  Kind kind = Kind::kZero;
  double scale = 1.0;

  double at(long n) const;
  double budget(long N) const;  // A_N = sum_{n <= N} a_n
  static Kind parse(const std::string& s);
  static std::string name(Kind k);
};

/// Time-varying losses l_n(x) = f_{x_n}(x) + <delta_n, x>, delta_n = delta_{n-1} + a_n u_n
/// with seeded unit directions u_n. The path is generated up front.
struct PredictableSequence {
  std::shared_ptr<const Bifunction> base;
  DriftSchedule schedule;
  std::vector<double> a;       // a[n-1] = a_n
  std::vector<Vector> delta;   // delta[n-1] = delta_n
};

PredictableSequence make_predictable(std::shared_ptr<const Bifunction> base,
                                     const DriftSchedule& schedule, std::uint64_t seed,
                                     long horizon);

/// What an algorithm plays against: a bifunction plus optional per-round tilts.
struct Environment {
  std::shared_ptr<const Bifunction> f;
  std::vector<Vector> tilts;  // empty: plain COL
  std::vector<double> drift;  // a_n, parallel to tilts

  static Environment col(std::shared_ptr<const Bifunction> f) { return {std::move(f), {}, {}}; }
  static Environment predictable(const PredictableSequence& p) { return {p.base, p.delta, p.a}; }

  bool has_drift() const { return !tilts.empty(); }
  Vector tilt(long n) const;
  double drift_at(long n) const;
};

}  // namespace col
