#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "col/geometry.hpp"

namespace col {

using Rng = std::mt19937_64;

/// (alpha, beta, gamma, G) with per-constant certification flags.
///   alpha: strong convexity of f_x(.)
///   beta:  Lipschitz constant of x -> grad f_x(x')
///   gamma: smoothness of f_x(.)
///   G:     bound on |grad f_x(x)| over the set
struct Regularity {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double G = 0.0;
  bool alpha_certified = false;
  bool beta_certified = false;
  bool gamma_certified = false;
  bool G_certified = false;

  static Regularity certified(double alpha, double beta, double gamma, double G) {
    return {alpha, beta, gamma, G, true, true, true, true};
  }
  bool fully_certified() const {
    return alpha_certified && beta_certified && gamma_certified && G_certified;
  }
  // beta < alpha with both constants certified (or estimated and accepted by the caller).
  bool contractive() const { return beta < alpha; }
  void validate() const;
};

/// Extra structure carried by bifunctions built from a monotone equilibrium
/// problem, f_x(x') = Phi(x, x').
struct EpStructure {
  std::string source;  // "convex_opt" | "matrix_game" | "linear_vi"
  bool skew_symmetric = false;
  // Lipschitz constant of Phi(., x) over the set.
  double query_lipschitz = 0.0;
  // Closed-form r_dep(x_hat) = max_x Phi(x, x_hat), when available.
  std::function<double(const Vector&)> dual_residual;
};

/// Running sum of weighted round losses sum_n w_n (f_{q_n}(x) + <t_n, x>),
/// with an exact minimizer over the set.
class CumulativeLoss {
 public:
  virtual ~CumulativeLoss() = default;
  virtual void add(const Vector& query, const Vector& tilt, double weight) = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector minimizer() const = 0;
  double min_value() const { return value(minimizer()); }
};

/// A COL problem f_x(x'): x is the query argument, x' the decision argument.
/// Round losses may carry an additive linear tilt <t, x'>; an empty tilt means zero.
struct Bifunction {
  using Eval = std::function<double(const Vector& query, const Vector& decision)>;
  using Grad = std::function<Vector(const Vector& query, const Vector& decision)>;
  using BestResponse = std::function<Vector(const Vector& query, const Vector& tilt)>;
  using SampleGrad = std::function<Vector(const Vector& query, const Vector& decision, Rng&)>;
  using CumulativeFactory = std::function<std::unique_ptr<CumulativeLoss>()>;

  std::string name;
  DecisionSet set = DecisionSet::cube(1, -1.0, 1.0);
  Regularity reg;
  Eval eval;
  Grad grad;
  BestResponse best_response;            // optional closed form
  SampleGrad sample_grad;                // optional problem-specific stochastic gradient
  CumulativeFactory cumulative;          // optional sufficient-statistics accumulator
  bool linear_in_decision = false;       // f_x(.) affine
  std::optional<EpStructure> ep;
  std::optional<Vector> known_equilibrium;

  Index dim() const { return set.dim(); }
  bool has_closed_form() const { return static_cast<bool>(best_response); }
};

/// f_query(decision), with membership checks on both arguments.
double loss_at(const Bifunction& f, const Vector& query, const Vector& decision);

/// Round loss f_query(x) + <tilt, x>.
double round_loss(const Bifunction& f, const Vector& query, const Vector& tilt, const Vector& x);
Vector round_grad(const Bifunction& f, const Vector& query, const Vector& tilt, const Vector& x);

/// Accumulator for any bifunction: stores every term and minimizes the sum by
/// projected gradient descent (or the linear minimizer for affine losses).
/// Cost grows linearly with the number of terms.
std::unique_ptr<CumulativeLoss> make_generic_cumulative(const Bifunction& f);
std::unique_ptr<CumulativeLoss> make_cumulative(const Bifunction& f);

/// Empirical regularity constants from pairwise sampling. alpha is a lower
/// estimate, beta/gamma/G are upper estimates; all flagged as not certified.
Regularity estimate_regularity(const Bifunction& f, int n_samples, std::uint64_t seed);

/// Largest relative error between grad and a central finite difference of eval
/// over random (query, decision) pairs.
double gradient_check(const Bifunction& f, int n_samples, std::uint64_t seed, double h = 1e-6);

}  // namespace col
