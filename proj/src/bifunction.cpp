#include "col/bifunction.hpp"

#include <algorithm>
#include <cmath>

#include "col/tolerances.hpp"

namespace col {

void Regularity::validate() const {
  for (double v : {alpha, beta, gamma, G}) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("regularity constants must be finite and >= 0");
  }
  if (alpha_certified && gamma_certified && gamma < alpha) {
    throw InvalidArgument("certified gamma must be >= certified alpha");
  }
}

double loss_at(const Bifunction& f, const Vector& query, const Vector& decision) {
  if (query.size() != f.dim() || decision.size() != f.dim()) {
    throw DimensionMismatch("loss_at: point dimension does not match " + f.set.describe());
  }
  if (!contains(f.set, query, 1e-9)) throw OutsideSet("loss_at: query outside the decision set");
  if (!contains(f.set, decision, 1e-9)) throw OutsideSet("loss_at: decision outside the decision set");
  return f.eval(query, decision);
}

double round_loss(const Bifunction& f, const Vector& query, const Vector& tilt, const Vector& x) {
  double v = f.eval(query, x);
  if (tilt.size() != 0) v += tilt.dot(x);
  return v;
}

Vector round_grad(const Bifunction& f, const Vector& query, const Vector& tilt, const Vector& x) {
  Vector g = f.grad(query, x);
  if (tilt.size() != 0) g += tilt;
  return g;
}

namespace {

class AffineCumulative : public CumulativeLoss {
 public:
  explicit AffineCumulative(const Bifunction& f)
      : f_(f), anchor_(center(f.set)), grad_sum_(Vector::Zero(f.dim())) {}

  void add(const Vector& query, const Vector& tilt, double weight) override {
    const Vector g = round_grad(f_, query, tilt, anchor_);
    constant_ += weight * round_loss(f_, query, tilt, anchor_);
    grad_sum_ += weight * g;
  }
  double value(const Vector& x) const override {
    return constant_ + grad_sum_.dot(x - anchor_);
  }
  Vector minimizer() const override { return linear_minimizer(f_.set, grad_sum_); }

 private:
  const Bifunction& f_;
  Vector anchor_;
  Vector grad_sum_;
  double constant_ = 0.0;
};

class StoredCumulative : public CumulativeLoss {
 public:
  explicit StoredCumulative(const Bifunction& f) : f_(f) {}

  void add(const Vector& query, const Vector& tilt, double weight) override {
    terms_.push_back({query, tilt, weight});
    total_weight_ += weight;
    if (warm_.size() == 0) warm_ = center(f_.set);
  }
  double value(const Vector& x) const override {
    double v = 0.0;
    for (const auto& t : terms_) v += t.w * round_loss(f_, t.q, t.t, x);
    return v;
  }
  Vector gradient(const Vector& x) const {
    Vector g = Vector::Zero(x.size());
    for (const auto& t : terms_) g += t.w * round_grad(f_, t.q, t.t, x);
    return g;
  }
  Vector minimizer() const override {
    if (terms_.empty()) return center(f_.set);
    const double smooth = std::max(f_.reg.gamma, 1e-12) * total_weight_;
    double step = 1.0 / smooth;
    Vector x = warm_;
    double fx = value(x);
    for (int it = 0; it < 20000; ++it) {
      const Vector g = gradient(x);
      Vector y;
      double fy;
      // Backtracking guards against an understated gamma.
      while (true) {
        y = project(f_.set, Vector(x - step * g));
        fy = value(y);
        const Vector d = y - x;
        if (fy <= fx + g.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15 || step < 1e-14) break;
        step *= 0.5;
      }
      const double move = (y - x).norm();
      x = y;
      fx = fy;
      if (move <= 1e-13 * (1.0 + x.norm())) break;
    }
    warm_ = x;
    return x;
  }

 private:
  struct Term {
    Vector q;
    Vector t;
    double w;
  };
  const Bifunction& f_;
  std::vector<Term> terms_;
  double total_weight_ = 0.0;
  mutable Vector warm_;
};

}  // namespace

std::unique_ptr<CumulativeLoss> make_generic_cumulative(const Bifunction& f) {
  if (f.linear_in_decision) return std::make_unique<AffineCumulative>(f);
  return std::make_unique<StoredCumulative>(f);
}

std::unique_ptr<CumulativeLoss> make_cumulative(const Bifunction& f) {
  if (f.cumulative) return f.cumulative();
  return make_generic_cumulative(f);
}

namespace {

Vector random_unit(Index d, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector u(d);
  do {
    for (Index i = 0; i < d; ++i) u[i] = n01(rng);
  } while (u.norm() == 0.0);
  return u / u.norm();
}

// Either an independent uniform pair or a local perturbation of the first point.
std::pair<Vector, Vector> sample_pair(const DecisionSet& set, Rng& rng, bool local) {
  Vector a = sample_uniform(set, rng);
  if (!local) return {a, sample_uniform(set, rng)};
  const double r = 1e-2 * diameter(set);
  Vector b = project(set, Vector(a + r * random_unit(a.size(), rng)));
  return {a, b};
}

}  // namespace

Regularity estimate_regularity(const Bifunction& f, int n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw InvalidArgument("estimate_regularity needs n_samples >= 2");
  Rng rng(seed);
  Regularity r;
  r.alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const bool local = (i % 2) == 1;
    const auto [a, b] = sample_pair(f.set, rng, local);
    const Vector q = sample_uniform(f.set, rng);
    const Vector z = sample_uniform(f.set, rng);
    const double dab = (a - b).norm();
    if (dab < 1e-12) continue;
    const Vector ga = f.grad(q, a);
    const Vector gb = f.grad(q, b);
    r.alpha = std::min(r.alpha, (ga - gb).dot(a - b) / (dab * dab));
    r.gamma = std::max(r.gamma, (ga - gb).norm() / dab);
    r.beta = std::max(r.beta, (f.grad(a, z) - f.grad(b, z)).norm() / dab);
    r.G = std::max(r.G, f.grad(a, a).norm());
  }
  if (!std::isfinite(r.alpha)) r.alpha = 0.0;
  r.alpha = std::max(r.alpha, 0.0);
  return r;
}

double gradient_check(const Bifunction& f, int n_samples, std::uint64_t seed, double h) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Vector q = sample_uniform(f.set, rng);
    const Vector x = sample_uniform(f.set, rng);
    const Vector g = f.grad(q, x);
    for (Index i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (f.eval(q, xp) - f.eval(q, xm)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
  }
  return worst;
}

}  // namespace col
