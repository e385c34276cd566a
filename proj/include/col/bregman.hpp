#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "col/geometry.hpp"
#include "col/tolerances.hpp"

namespace col {

/// Mirror map R and the divergence it induces.
///   Euclidean:        R(x) = 1/2 |x|^2, L = 1
///   NegativeEntropy:  R(x) = sum x_i log x_i on (products of) simplexes, L unbounded
struct BregmanGeometry {
  enum class Kind { kEuclidean, kNegativeEntropy };
  Kind kind = Kind::kEuclidean;

  static BregmanGeometry euclidean() { return {Kind::kEuclidean}; }
  static BregmanGeometry entropy() { return {Kind::kNegativeEntropy}; }

  double strong_convexity() const { return 1.0; }
  double smoothness() const {
    return kind == Kind::kEuclidean ? 1.0 : std::numeric_limits<double>::infinity();
  }
  bool smoothness_bounded() const { return kind == Kind::kEuclidean; }

  std::string name() const { return kind == Kind::kEuclidean ? "euclidean" : "entropy"; }
  static BregmanGeometry parse(const std::string& s) {
    if (s == "euclidean") return euclidean();
    if (s == "entropy") return entropy();
    throw InvalidArgument("unknown geometry '" + s + "' (expected euclidean|entropy)");
  }
};

/// B_R(x' || x). Entropy uses the generalized KL divergence, which agrees with
/// KL on simplex points.
template <typename Scalar>
Scalar bregman(const BregmanGeometry& geom, const VectorX<Scalar>& x_prime,
               const VectorX<Scalar>& x) {
  if (x_prime.size() != x.size()) throw DimensionMismatch("bregman: size mismatch");
  if (geom.kind == BregmanGeometry::Kind::kEuclidean) {
    return Scalar(0.5) * (x_prime - x).squaredNorm();
  }
  if ((x.array() <= Scalar(0)).any()) {
    throw InvalidArgument("entropy divergence needs a strictly positive reference point");
  }
  Scalar acc = 0;
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar a = x_prime[i];
    if (a < Scalar(0)) throw InvalidArgument("entropy divergence needs x' >= 0");
    if (a > Scalar(0)) acc += a * std::log(a / x[i]);
    acc += x[i] - a;
  }
  return acc;
}

namespace detail {

template <typename Scalar>
void entropy_step_into(const BasicDecisionSet<Scalar>& set, const VectorX<Scalar>& x,
                       const VectorX<Scalar>& g, Scalar eta, VectorX<Scalar>& out,
                       Index off) {
  using Set = BasicDecisionSet<Scalar>;
  if (set.kind() == Set::Kind::kSimplex) {
    const Index k = set.dim();
    VectorX<Scalar> logw(k);
    for (Index i = 0; i < k; ++i) {
      const Scalar xi = std::max(x[off + i], Scalar(tol::kEntropyFloor));
      logw[i] = std::log(xi) - eta * g[off + i];
    }
    // Shift by the max before exponentiating to avoid overflow.
    const Scalar m = logw.maxCoeff();
    VectorX<Scalar> w = (logw.array() - m).exp().matrix();
    w /= w.sum();
    w = w.cwiseMax(Scalar(tol::kEntropyFloor));
    out.segment(off, k) = w / w.sum();
    return;
  }
  if (set.kind() == Set::Kind::kProduct) {
    for (const auto& f : std::get<typename Set::Product>(set.variant()).factors) {
      entropy_step_into(f, x, g, eta, out, off);
      off += f.dim();
    }
    return;
  }
  throw InvalidArgument("entropy geometry requires a simplex or a product of simplexes, got " +
                        set.describe());
}

}  // namespace detail

/// argmin over the set of <eta g, x'> + B_R(x' || x).
template <typename Scalar>
VectorX<Scalar> mirror_step(const BregmanGeometry& geom, const BasicDecisionSet<Scalar>& set,
                            const VectorX<Scalar>& x, const VectorX<Scalar>& g, Scalar eta) {
  if (x.size() != set.dim() || g.size() != set.dim()) {
    throw DimensionMismatch("mirror_step: point/gradient do not match the set");
  }
  if (!(eta >= Scalar(0))) throw InvalidArgument("mirror_step: eta must be nonnegative");
  if (geom.kind == BregmanGeometry::Kind::kEuclidean) {
    return project(set, VectorX<Scalar>(x - eta * g));
  }
  if (!set.is_simplicial()) {
    throw InvalidArgument("entropy geometry requires a simplex or a product of simplexes, got " +
                          set.describe());
  }
  VectorX<Scalar> out(x.size());
  detail::entropy_step_into(set, x, g, eta, out, 0);
  return out;
}

}  // namespace col
