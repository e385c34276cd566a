#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "col/bifunction.hpp"

namespace col {

/// Episodic tabular MDP. Row s*A + a of P is the next-state distribution P(.|s,a).
struct TabularMDP {
  int S = 0;
  int A = 0;
  int H = 0;
  Matrix P;
  Vector initial;

  void validate() const;

  /// Plain-text layout: a header line `S A H`, then S*A rows of S probabilities
  /// (row s*A + a), then an optional line with the initial distribution
  /// (uniform when absent). Lines starting with '#' are ignored.
  static TabularMDP load(const std::string& path);
  void save(const std::string& path) const;
};

/// S x A, each row a distribution over actions.
using PolicyMatrix = Matrix;

TabularMDP random_mdp(int S, int A, int H, std::uint64_t seed);
PolicyMatrix random_policy(int S, int A, std::uint64_t seed);
void validate_policy(const PolicyMatrix& pi, int S, int A);

/// d_1 .. d_H with d_1 = initial and d_{t+1}(s') = sum_{s,a} d_t(s) pi(a|s) P(s'|s,a).
std::vector<Vector> per_step_distributions(const TabularMDP& mdp, const PolicyMatrix& pi);
/// (1/H) sum_t d_t.
Vector state_distribution(const TabularMDP& mdp, const PolicyMatrix& pi);

struct ILOptions {
  double mu = 1.0;             // regularizer weight
  std::vector<int> groups;     // state -> parameter group; empty means one group per state
  int beta_samples = 4000;
  std::uint64_t beta_seed = 7;
  double beta_inflation = 1.2;
};

/// Policy parameters theta: one action distribution per group, stacked.
struct ILLayout {
  int S = 0;
  int A = 0;
  int G = 0;
  std::vector<int> group_of;              // state -> group
  std::vector<std::vector<int>> members;  // group -> states

  static ILLayout make(int S, int A, const std::vector<int>& groups);
  PolicyMatrix policy(const Vector& theta) const;
  Vector params(const PolicyMatrix& pi) const;  // group average of rows
};

/// Online imitation learning as a COL problem over theta:
///   f_q(theta) = sum_s (d^{pi_q}(s) + mu/|g(s)|)/2 |theta_{g(s)} - pi*_s|^2
/// alpha = mu and gamma = 1 + mu certified; beta estimated and inflated.
/// The stochastic gradient samples one state per step from d_1 .. d_H.
Bifunction make_il_problem(const TabularMDP& mdp, const PolicyMatrix& expert, const ILOptions& opt);

struct ILConvergenceReport {
  double eta = 0.0;
  double bound = 0.0;      // 1 - ((alpha - beta)/(gamma + beta))^2
  double max_ratio = 0.0;
  bool holds = true;
  Vector pi_hat;
  std::vector<double> ratios;
};

/// Projected gradient descent with exact gradients from `initial` for N rounds;
/// checks |pi_n - pi_hat|^2 / |pi_{n-1} - pi_hat|^2 <= bound + tol whenever the
/// denominator exceeds 1e-12.
ILConvergenceReport il_convergence_check(const Bifunction& f, double eta, long N,
                                         const Vector& initial, double tol = 1e-6);

}  // namespace col
