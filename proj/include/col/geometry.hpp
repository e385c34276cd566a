#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "col/errors.hpp"

namespace col {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using Index = Eigen::Index;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

/// Compact convex decision set. Boxes, Euclidean balls, probability simplexes
/// and Cartesian products of those.
template <typename Scalar>
class BasicDecisionSet {
 public:
  using Vec = VectorX<Scalar>;

  struct Box {
    Vec lower;
    Vec upper;
  };
  struct Ball {
    Vec center;
    Scalar radius;
  };
  struct Simplex {
    Index dim;
  };
  struct Product {
    std::vector<BasicDecisionSet> factors;
  };

  enum class Kind { kBox, kBall, kSimplex, kProduct };

  static BasicDecisionSet box(Vec lower, Vec upper) {
    if (lower.size() != upper.size() || lower.size() == 0) {
      throw DimensionMismatch("box bounds must be nonempty and of equal length");
    }
    if (!lower.allFinite() || !upper.allFinite()) {
      throw InvalidArgument("box bounds must be finite");
    }
    if ((upper - lower).minCoeff() < Scalar(0)) {
      throw InvalidArgument("box requires lower <= upper componentwise");
    }
    if ((upper - lower).maxCoeff() <= Scalar(0)) {
      throw InvalidArgument("box has zero diameter");
    }
    return BasicDecisionSet(Box{std::move(lower), std::move(upper)});
  }

  static BasicDecisionSet cube(Index d, Scalar lo, Scalar hi) {
    return box(Vec::Constant(d, lo), Vec::Constant(d, hi));
  }

  static BasicDecisionSet ball(Vec center, Scalar radius) {
    if (center.size() == 0) throw DimensionMismatch("ball center must be nonempty");
    if (!center.allFinite() || !std::isfinite(double(radius)) || !(radius > Scalar(0))) {
      throw InvalidArgument("ball needs a finite center and positive radius");
    }
    return BasicDecisionSet(Ball{std::move(center), radius});
  }

  static BasicDecisionSet simplex(Index d) {
    if (d < 2) throw InvalidArgument("simplex needs dimension >= 2");
    return BasicDecisionSet(Simplex{d});
  }

  static BasicDecisionSet product(std::vector<BasicDecisionSet> factors) {
    if (factors.empty()) throw InvalidArgument("product of zero sets");
    return BasicDecisionSet(Product{std::move(factors)});
  }

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  const auto& variant() const { return v_; }

  Index dim() const {
    return std::visit(
        [](const auto& s) -> Index {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Box>) return s.lower.size();
          if constexpr (std::is_same_v<T, Ball>) return s.center.size();
          if constexpr (std::is_same_v<T, Simplex>) return s.dim;
          if constexpr (std::is_same_v<T, Product>) {
            Index d = 0;
            for (const auto& f : s.factors) d += f.dim();
            return d;
          }
        },
        v_);
  }

  // Dimension of the affine hull; what grid searches scale with.
  Index intrinsic_dim() const {
    switch (kind()) {
      case Kind::kSimplex: return dim() - 1;
      case Kind::kProduct: {
        Index d = 0;
        for (const auto& f : std::get<Product>(v_).factors) d += f.intrinsic_dim();
        return d;
      }
      default: return dim();
    }
  }

  // True when every factor (or the set itself) is a simplex.
  bool is_simplicial() const {
    if (kind() == Kind::kSimplex) return true;
    if (kind() != Kind::kProduct) return false;
    for (const auto& f : std::get<Product>(v_).factors) {
      if (!f.is_simplicial()) return false;
    }
    return true;
  }

  std::string describe() const {
    switch (kind()) {
      case Kind::kBox: return "box(" + std::to_string(dim()) + ")";
      case Kind::kBall: return "ball(" + std::to_string(dim()) + ")";
      case Kind::kSimplex: return "simplex(" + std::to_string(dim()) + ")";
      case Kind::kProduct: {
        std::string s = "product[";
        const auto& fs = std::get<Product>(v_).factors;
        for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? "," : "") + fs[i].describe();
        return s + "]";
      }
    }
    return "?";
  }

 private:
  template <typename T>
  explicit BasicDecisionSet(T v) : v_(std::move(v)) {}

  std::variant<Box, Ball, Simplex, Product> v_;
};

using DecisionSet = BasicDecisionSet<double>;

namespace detail {

template <typename Scalar>
void check_dim(const BasicDecisionSet<Scalar>& set, Index n) {
  if (set.dim() != n) {
    throw DimensionMismatch("point of dimension " + std::to_string(n) + " does not fit " +
                            set.describe());
  }
}

// Sort-based Euclidean projection onto {x >= 0, sum x = 1}.
template <typename Scalar>
VectorX<Scalar> project_simplex(const VectorX<Scalar>& v) {
  const Index d = v.size();
  std::vector<Scalar> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<Scalar>());
  Scalar cumsum = 0;
  Scalar theta = 0;
  for (Index j = 0; j < d; ++j) {
    cumsum += u[j];
    const Scalar t = (cumsum - Scalar(1)) / Scalar(j + 1);
    if (u[j] - t > Scalar(0)) theta = t;
  }
  return (v.array() - theta).max(Scalar(0)).matrix();
}

}  // namespace detail

/// Euclidean projection of p onto the set.
template <typename Scalar>
VectorX<Scalar> project(const BasicDecisionSet<Scalar>& set, const VectorX<Scalar>& p) {
  using Set = BasicDecisionSet<Scalar>;
  detail::check_dim(set, p.size());
  return std::visit(
      [&](const auto& s) -> VectorX<Scalar> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          return p.cwiseMax(s.lower).cwiseMin(s.upper);
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          const VectorX<Scalar> off = p - s.center;
          const Scalar r = off.norm();
          if (r <= s.radius) return p;
          return s.center + off * (s.radius / r);
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          return detail::project_simplex<Scalar>(p);
        } else {
          VectorX<Scalar> out(p.size());
          Index off = 0;
          for (const auto& f : s.factors) {
            const Index k = f.dim();
            out.segment(off, k) = project(f, VectorX<Scalar>(p.segment(off, k)));
            off += k;
          }
          return out;
        }
      },
      set.variant());
}

/// max ||x - x'|| over the set, in closed form per variant.
template <typename Scalar>
Scalar diameter(const BasicDecisionSet<Scalar>& set) {
  using Set = BasicDecisionSet<Scalar>;
  return std::visit(
      [&](const auto& s) -> Scalar {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          return (s.upper - s.lower).norm();
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          return Scalar(2) * s.radius;
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          return std::sqrt(Scalar(2));
        } else {
          Scalar sq = 0;
          for (const auto& f : s.factors) {
            const Scalar df = diameter(f);
            sq += df * df;
          }
          return std::sqrt(sq);
        }
      },
      set.variant());
}

/// max ||x|| over the set.
template <typename Scalar>
Scalar max_norm(const BasicDecisionSet<Scalar>& set) {
  using Set = BasicDecisionSet<Scalar>;
  return std::visit(
      [&](const auto& s) -> Scalar {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          return s.lower.cwiseAbs().cwiseMax(s.upper.cwiseAbs()).norm();
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          return s.center.norm() + s.radius;
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          return Scalar(1);
        } else {
          Scalar sq = 0;
          for (const auto& f : s.factors) {
            const Scalar m = max_norm(f);
            sq += m * m;
          }
          return std::sqrt(sq);
        }
      },
      set.variant());
}

template <typename Scalar>
bool contains(const BasicDecisionSet<Scalar>& set, const VectorX<Scalar>& p,
              Scalar tol = Scalar(1e-12)) {
  if (set.dim() != p.size() || !p.allFinite()) return false;
  return (project(set, p) - p).norm() <= tol;
}

/// A canonical interior point: box midpoint, ball center, uniform distribution.
template <typename Scalar>
VectorX<Scalar> center(const BasicDecisionSet<Scalar>& set) {
  using Set = BasicDecisionSet<Scalar>;
  return std::visit(
      [&](const auto& s) -> VectorX<Scalar> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          return (s.lower + s.upper) / Scalar(2);
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          return s.center;
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          return VectorX<Scalar>::Constant(s.dim, Scalar(1) / Scalar(s.dim));
        } else {
          VectorX<Scalar> out(set.dim());
          Index off = 0;
          for (const auto& f : s.factors) {
            out.segment(off, f.dim()) = center(f);
            off += f.dim();
          }
          return out;
        }
      },
      set.variant());
}

/// argmin over the set of <g, x>. Ties broken toward the lowest index.
template <typename Scalar>
VectorX<Scalar> linear_minimizer(const BasicDecisionSet<Scalar>& set, const VectorX<Scalar>& g) {
  using Set = BasicDecisionSet<Scalar>;
  detail::check_dim(set, g.size());
  return std::visit(
      [&](const auto& s) -> VectorX<Scalar> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          VectorX<Scalar> out = center(set);
          for (Index i = 0; i < g.size(); ++i) {
            if (g[i] > 0) out[i] = s.lower[i];
            if (g[i] < 0) out[i] = s.upper[i];
          }
          return out;
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          const Scalar n = g.norm();
          if (n == Scalar(0)) return s.center;
          return s.center - g * (s.radius / n);
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          Index arg = 0;
          g.minCoeff(&arg);
          VectorX<Scalar> out = VectorX<Scalar>::Zero(s.dim);
          out[arg] = Scalar(1);
          return out;
        } else {
          VectorX<Scalar> out(set.dim());
          Index off = 0;
          for (const auto& f : s.factors) {
            out.segment(off, f.dim()) = linear_minimizer(f, VectorX<Scalar>(g.segment(off, f.dim())));
            off += f.dim();
          }
          return out;
        }
      },
      set.variant());
}

/// Uniform sample from the set (Dirichlet(1) on simplexes).
template <typename Scalar, typename Rng>
VectorX<Scalar> sample_uniform(const BasicDecisionSet<Scalar>& set, Rng& rng) {
  using Set = BasicDecisionSet<Scalar>;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  return std::visit(
      [&](const auto& s) -> VectorX<Scalar> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          VectorX<Scalar> out(s.lower.size());
          for (Index i = 0; i < out.size(); ++i) {
            out[i] = s.lower[i] + Scalar(unif(rng)) * (s.upper[i] - s.lower[i]);
          }
          return out;
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          const Index d = s.center.size();
          VectorX<Scalar> dir(d);
          for (Index i = 0; i < d; ++i) dir[i] = Scalar(normal(rng));
          const Scalar n = dir.norm();
          if (n == Scalar(0)) return s.center;
          const Scalar r = s.radius * Scalar(std::pow(unif(rng), 1.0 / double(d)));
          return s.center + dir * (r / n);
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          VectorX<Scalar> out(s.dim);
          for (Index i = 0; i < s.dim; ++i) out[i] = Scalar(expo(rng));
          return out / out.sum();
        } else {
          VectorX<Scalar> out(set.dim());
          Index off = 0;
          for (const auto& f : s.factors) {
            out.segment(off, f.dim()) = sample_uniform(f, rng);
            off += f.dim();
          }
          return out;
        }
      },
      set.variant());
}

/// Deterministic grid covering the set with `points_per_dim` points along each
/// intrinsic axis. Boxes get a tensor grid, balls the projection of their
/// bounding-box grid, simplexes the regular lattice, products the Cartesian
/// product of factor grids.
template <typename Scalar>
std::vector<VectorX<Scalar>> grid(const BasicDecisionSet<Scalar>& set, Index points_per_dim) {
  using Set = BasicDecisionSet<Scalar>;
  if (points_per_dim < 2) throw InvalidArgument("grid needs at least 2 points per dimension");
  const Index k = points_per_dim;

  auto tensor = [k](const VectorX<Scalar>& lo, const VectorX<Scalar>& hi) {
    const Index d = lo.size();
    std::vector<VectorX<Scalar>> pts;
    std::vector<Index> idx(d, 0);
    while (true) {
      VectorX<Scalar> p(d);
      for (Index i = 0; i < d; ++i) {
        p[i] = lo[i] + (hi[i] - lo[i]) * Scalar(idx[i]) / Scalar(k - 1);
      }
      pts.push_back(std::move(p));
      Index i = 0;
      while (i < d && ++idx[i] == k) idx[i++] = 0;
      if (i == d) break;
    }
    return pts;
  };

  return std::visit(
      [&](const auto& s) -> std::vector<VectorX<Scalar>> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, typename Set::Box>) {
          return tensor(s.lower, s.upper);
        } else if constexpr (std::is_same_v<T, typename Set::Ball>) {
          const VectorX<Scalar> r = VectorX<Scalar>::Constant(s.center.size(), s.radius);
          auto pts = tensor(VectorX<Scalar>(s.center - r), VectorX<Scalar>(s.center + r));
          for (auto& p : pts) p = project(set, p);
          return pts;
        } else if constexpr (std::is_same_v<T, typename Set::Simplex>) {
          // Compositions of (k - 1) into s.dim nonnegative parts.
          std::vector<VectorX<Scalar>> pts;
          const Index total = k - 1;
          std::vector<Index> c(s.dim, 0);
          std::function<void(Index, Index)> rec = [&](Index pos, Index left) {
            if (pos == s.dim - 1) {
              c[pos] = left;
              VectorX<Scalar> p(s.dim);
              for (Index i = 0; i < s.dim; ++i) p[i] = Scalar(c[i]) / Scalar(total);
              pts.push_back(std::move(p));
              return;
            }
            for (Index v = 0; v <= left; ++v) {
              c[pos] = v;
              rec(pos + 1, left - v);
            }
          };
          rec(0, total);
          return pts;
        } else {
          std::vector<VectorX<Scalar>> acc{VectorX<Scalar>(0)};
          for (const auto& f : s.factors) {
            const auto fp = grid(f, k);
            std::vector<VectorX<Scalar>> next;
            next.reserve(acc.size() * fp.size());
            for (const auto& a : acc) {
              for (const auto& b : fp) {
                VectorX<Scalar> p(a.size() + b.size());
                p << a, b;
                next.push_back(std::move(p));
              }
            }
            acc = std::move(next);
          }
          return acc;
        }
      },
      set.variant());
}

}  // namespace col
