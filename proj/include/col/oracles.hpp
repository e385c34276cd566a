#pragma once

#include <functional>
#include <string>

#include "col/bifunction.hpp"
#include "col/tolerances.hpp"

namespace col {

/// argmin over the set of f_x(.) + <tilt, .>. Closed form when the problem has
/// one, else projected gradient descent stopped once the gradient mapping is
/// below sqrt(2 alpha tol), which bounds the suboptimality by tol.
Vector best_response(const Bifunction& f, const Vector& x, const Vector& tilt = Vector(),
                     double tol = tol::kOracle, int max_iter = 200000);

/// rho(x) = f_x(x) - min f_x, optionally for a tilted round loss. Not clamped at 0.
double gap(const Bifunction& f, const Vector& x, const Vector& tilt = Vector(),
           double tol = tol::kOracle);

struct EquilibriumCertificate {
  enum class Method { kFixedPointIteration, kGapMinimization, kClosedForm };
  Vector x_star;
  double gap_value = 0.0;
  Method method = Method::kClosedForm;
  long iterations = 0;
  // False for best-effort gap minimization and for contraction with estimated constants.
  bool certified = false;

  std::string method_name() const;
};

/// Fixed-point iteration of the best response when beta < alpha; a supplied
/// closed-form equilibrium when the problem carries one; otherwise grid-seeded
/// local minimization of the gap (intrinsic dimension <= 3, uncertified).
EquilibriumCertificate find_equilibrium(const Bifunction& f, double tol = 1e-10,
                                        int max_iter = 100000, Index grid_points_per_dim = 21);

/// r_dep(x_hat) = max_x Phi(x, x_hat). Closed form when the source has one,
/// otherwise a grid maximization polished by compass search.
double dual_residual(const Bifunction& f, const Vector& x_hat, Index grid_points_per_dim = 41);

/// max_x <grad f_x(x), x_hat - x> over a grid, polished by compass search.
double dvi_residual(const Bifunction& f, const Vector& x_hat, Index grid_points_per_dim = 41);

/// Derivative-free local minimization over the set: coordinate moves of
/// shrinking length, projected back onto the set.
Vector compass_search(const DecisionSet& set, const std::function<double(const Vector&)>& objective,
                      Vector x0, double step0, double min_step, int max_evals = 200000);

}  // namespace col
