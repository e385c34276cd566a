#pragma once

#include <optional>
#include <string>
#include <vector>

#include "col/bifunction.hpp"
#include "col/trace.hpp"

namespace col {

/// Sum of gaps over the first N rounds (all rounds when N < 0).
double dynamic_regret(const RunTrace& trace, long N = -1);

/// sum_n l_n(x_n) - l_n(comparator), or minus min_x sum_n l_n(x) when no
/// comparator is given. Re-queries the problem with the recorded queries.
double static_regret(const RunTrace& trace, const Bifunction& f,
                     const std::optional<Vector>& comparator = std::nullopt, long N = -1);

/// sum_n w_n l_n(x_n) - min_x sum_n w_n l_n(x). Weights must be positive.
double weighted_static_regret(const RunTrace& trace, const Bifunction& f,
                              const std::vector<double>& weights, long N = -1);

/// Weighted average of the first N iterates (uniform when `weights` is empty).
Vector averaged_iterate(const RunTrace& trace, const std::vector<double>& weights = {},
                        long N = -1);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log y against log n over rows with lo <= n <= hi and y > 0.
SlopeFit loglog_slope(const std::vector<double>& n, const std::vector<double>& y, double lo,
                      double hi);

/// Fit over the last decade of rounds, N/10 .. N.
SlopeFit last_decade_slope(const std::vector<double>& n, const std::vector<double>& y);

enum class BoundKind {
  kDynamicRegretUpper,        // dynamic <= min{G sum D, static(x*)} + sum min{beta D_X D, beta^2 D^2/(2 alpha)}
  kDynamicRegretLower,        // dynamic >= (alpha/2) sum |x_n^* - x*|^2
  kDualResidualByStaticRegret,  // r_dep(averaged iterate) <= static / N
  kLinearizedStaticReduction,   // dynamic <= static(x*) + beta^2 linear_static(x*) / (2 alpha (alpha - beta))
  kPathVariation,             // sum |x_n^* - x_{n+1}^*| <= sum (beta/alpha)|x_n - x_{n+1}| + a_{n+1}/alpha
  kPredictableContraction,    // per round |x_n^* - x_{n-1}^*| <= (beta/alpha)|x_n - x_{n-1}| + a_n/alpha
};

std::string bound_name(BoundKind k);

struct BoundReport {
  BoundKind kind;
  bool holds = true;
  double min_slack = 0.0;  // smallest (allowed side - checked side) over the evaluated prefixes
  long worst_round = 0;
  long rounds_checked = 0;
  std::vector<double> slack;  // per evaluated prefix
};

/// Evaluates both sides of the inequality at every prefix length N (at
/// `checkpoints` when given) and reports the smallest slack. `tol` is the
/// allowed violation.
BoundReport check_theorem_bounds(const RunTrace& trace, const Bifunction& f, BoundKind which,
                                 double tol = 0.0, const std::vector<long>& checkpoints = {});

/// Per-step B_R(x* || x_{n+1}) / B_R(x* || x_n) for rounds where the
/// denominator exceeds `floor`; Euclidean geometry.
std::vector<double> bregman_ratios(const RunTrace& trace, const Vector& x_star,
                                   double floor = 1e-12);

}  // namespace col
