#include "col/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace col {

namespace {

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

class TrackingCumulative : public CumulativeLoss {
 public:
  TrackingCumulative(double alpha, Matrix Q, Vector c, DecisionSet set)
      : alpha_(alpha), Q_(std::move(Q)), c_(std::move(c)), set_(std::move(set)),
        m_sum_(Vector::Zero(c_.size())), t_sum_(Vector::Zero(c_.size())) {}

  void add(const Vector& query, const Vector& tilt, double w) override {
    const Vector m = Q_ * query + c_;
    W_ += w;
    m_sum_ += w * m;
    m_sq_ += w * m.squaredNorm();
    if (tilt.size() != 0) t_sum_ += w * tilt;
  }
  double value(const Vector& x) const override {
    return 0.5 * alpha_ * (W_ * x.squaredNorm() - 2.0 * x.dot(m_sum_) + m_sq_) + t_sum_.dot(x);
  }
  Vector minimizer() const override {
    if (W_ <= 0.0) return center(set_);
    return project(set_, Vector((m_sum_ - t_sum_ / alpha_) / W_));
  }

 private:
  double alpha_;
  Matrix Q_;
  Vector c_;
  DecisionSet set_;
  double W_ = 0.0;
  Vector m_sum_;
  double m_sq_ = 0.0;
  Vector t_sum_;
};

}  // namespace

Bifunction make_linear_tracking(double alpha, const Matrix& Q, const Vector& c,
                                const DecisionSet& set, std::string name) {
  const Index d = set.dim();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("tracking: alpha must be > 0");
  if (Q.rows() != d || Q.cols() != d || c.size() != d) {
    throw DimensionMismatch("tracking: Q must be d x d and c of length d");
  }
  if (!Q.allFinite() || !c.allFinite()) throw InvalidArgument("tracking: Q and c must be finite");

  const double qn = spectral_norm(Q);
  const double D = diameter(set);
  const double R = std::max(D, max_norm(set));

  Bifunction f;
  f.name = std::move(name);
  f.set = set;
  f.reg = Regularity::certified(alpha, alpha * qn, alpha, alpha * (qn * R + c.norm() + R));
  f.eval = [alpha, Q, c](const Vector& q, const Vector& x) {
    return 0.5 * alpha * (x - Q * q - c).squaredNorm();
  };
  f.grad = [alpha, Q, c](const Vector& q, const Vector& x) -> Vector {
    return alpha * (x - Q * q - c);
  };
  f.best_response = [alpha, Q, c, set](const Vector& q, const Vector& t) -> Vector {
    Vector target = Q * q + c;
    if (t.size() != 0) target -= t / alpha;
    return project(set, target);
  };
  f.cumulative = [alpha, Q, c, set]() -> std::unique_ptr<CumulativeLoss> {
    return std::make_unique<TrackingCumulative>(alpha, Q, c, set);
  };
  return f;
}

Bifunction make_quadratic_tracking(double alpha, double lambda, const Vector& c,
                                   const DecisionSet& set) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("tracking: lambda must be >= 0");
  const Index d = set.dim();
  Bifunction f = make_linear_tracking(alpha, lambda * Matrix::Identity(d, d), c, set,
                                      "quadratic_tracking");
  const double D = diameter(set);
  if (max_norm(set) <= D) f.reg.G = alpha * (lambda * D + c.norm() + D);
  // With c = 0 the origin is a fixed point whenever it is feasible.
  if (c.norm() == 0.0 && contains(set, Vector(Vector::Zero(d)))) {
    f.known_equilibrium = Vector::Zero(d);
  }
  return f;
}

Bifunction make_rotation(double alpha, double angle_rad, double radius) {
  Matrix Q(2, 2);
  Q << std::cos(angle_rad), -std::sin(angle_rad), std::sin(angle_rad), std::cos(angle_rad);
  Bifunction f = make_linear_tracking(alpha, Q, Vector::Zero(2),
                                      DecisionSet::ball(Vector::Zero(2), radius), "rotation");
  f.known_equilibrium = Vector::Zero(2);
  return f;
}

Bifunction make_reflected_expansion() {
  Matrix Q(1, 1);
  Q << -2.0;
  Vector c(1);
  c << 0.6;
  Bifunction f = make_linear_tracking(1.0, Q, c, DecisionSet::cube(1, -1.0, 1.0),
                                      "reflected_expansion");
  Vector xs(1);
  xs << 0.2;
  f.known_equilibrium = xs;
  return f;
}

ConvexFunction squared_distance(const Vector& a, const DecisionSet& set) {
  if (a.size() != set.dim()) throw DimensionMismatch("squared_distance: anchor dimension");
  ConvexFunction h;
  h.value = [a](const Vector& x) { return (x - a).squaredNorm(); };
  h.grad = [a](const Vector& x) -> Vector { return 2.0 * (x - a); };
  h.tilted_minimizer = [a, set](const Vector& t) -> Vector {
    return project(set, Vector(a - 0.5 * t));
  };
  h.modulus = 2.0;
  h.smoothness = 2.0;
  return h;
}

namespace {

class ConvexOptCumulative : public CumulativeLoss {
 public:
  explicit ConvexOptCumulative(ConvexFunction h) : h_(std::move(h)) {}
  void add(const Vector& query, const Vector& tilt, double w) override {
    if (t_sum_.size() == 0) t_sum_ = Vector::Zero(query.size());
    W_ += w;
    offset_ += w * h_.value(query);
    if (tilt.size() != 0) t_sum_ += w * tilt;
  }
  double value(const Vector& x) const override {
    double v = W_ * h_.value(x) - offset_;
    if (t_sum_.size() != 0) v += t_sum_.dot(x);
    return v;
  }
  Vector minimizer() const override {
    if (W_ <= 0.0) return h_.tilted_minimizer(Vector());
    return h_.tilted_minimizer(Vector(t_sum_ / W_));
  }

 private:
  ConvexFunction h_;
  double W_ = 0.0;
  double offset_ = 0.0;
  Vector t_sum_;
};

}  // namespace

Bifunction make_convex_opt(const ConvexFunction& h, const DecisionSet& set) {
  const Index d = set.dim();
  const Vector zero = Vector::Zero(d);
  const Vector argmin_h = h.tilted_minimizer(zero);
  const double min_h = h.value(argmin_h);

  // Bound on |grad h| over the set from smoothness around the minimizer.
  const double gmax = h.smoothness * diameter(set) + h.grad(argmin_h).norm();

  Bifunction f;
  f.name = "convex_opt";
  f.set = set;
  f.reg = Regularity::certified(h.modulus, 0.0, h.smoothness, gmax);
  f.eval = [h](const Vector& q, const Vector& x) { return h.value(x) - h.value(q); };
  f.grad = [h](const Vector&, const Vector& x) -> Vector { return h.grad(x); };
  f.best_response = [h](const Vector& q, const Vector& t) -> Vector {
    return h.tilted_minimizer(t.size() != 0 ? t : Vector(Vector::Zero(q.size())));
  };
  f.cumulative = [h]() -> std::unique_ptr<CumulativeLoss> {
    return std::make_unique<ConvexOptCumulative>(h);
  };
  f.known_equilibrium = argmin_h;

  EpStructure ep;
  ep.source = "convex_opt";
  ep.skew_symmetric = true;
  ep.query_lipschitz = gmax;
  ep.dual_residual = [h, min_h](const Vector& x_hat) { return h.value(x_hat) - min_h; };
  f.ep = ep;
  return f;
}

Bifunction make_matrix_game(const Matrix& A) {
  if (A.rows() < 2 || A.cols() < 2) throw InvalidArgument("matrix game needs at least 2x2 payoffs");
  if (!A.allFinite()) throw InvalidArgument("matrix game payoffs must be finite");
  const Index m = A.rows();
  const Index k = A.cols();
  const DecisionSet set = DecisionSet::product({DecisionSet::simplex(m), DecisionSet::simplex(k)});
  const double an = spectral_norm(A);

  auto op = [A, m, k](const Vector& q) -> Vector {
    Vector g(m + k);
    g.head(m) = A * q.tail(k);
    g.tail(k) = -A.transpose() * q.head(m);
    return g;
  };

  Bifunction f;
  f.name = "matrix_game";
  f.set = set;
  f.reg = Regularity::certified(0.0, an, 0.0, an * std::sqrt(2.0));
  f.linear_in_decision = true;
  f.eval = [A, m, k](const Vector& q, const Vector& x) {
    return x.head(m).dot(A * q.tail(k)) - q.head(m).dot(A * x.tail(k));
  };
  f.grad = [op](const Vector& q, const Vector&) -> Vector { return op(q); };
  f.best_response = [op, set](const Vector& q, const Vector& t) -> Vector {
    Vector g = op(q);
    if (t.size() != 0) g += t;
    return linear_minimizer(set, g);
  };

  EpStructure ep;
  ep.source = "matrix_game";
  ep.skew_symmetric = true;
  ep.query_lipschitz = an * std::sqrt(2.0);
  ep.dual_residual = [A, m, k](const Vector& x_hat) {
    const Vector u = x_hat.head(m);
    const Vector v = x_hat.tail(k);
    return (A.transpose() * u).maxCoeff() - (A * v).minCoeff();
  };
  f.ep = ep;
  return f;
}

Bifunction make_linear_vi(const Matrix& M, const Vector& q, const DecisionSet& set) {
  const Index d = set.dim();
  if (M.rows() != d || M.cols() != d || q.size() != d) {
    throw DimensionMismatch("linear VI: M must be d x d and q of length d");
  }
  if (!M.allFinite() || !q.allFinite()) throw InvalidArgument("linear VI data must be finite");
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin < -1e-12 * std::max(1.0, M.norm())) {
    throw InvalidArgument("linear VI: symmetric part of M is not positive semidefinite");
  }
  const double mn = spectral_norm(M);
  const double D = diameter(set);
  const double R = max_norm(set);

  Bifunction f;
  f.name = "linear_vi";
  f.set = set;
  f.reg = Regularity::certified(0.0, mn, 0.0, mn * R + q.norm());
  f.linear_in_decision = true;
  f.eval = [M, q](const Vector& y, const Vector& x) { return (M * y + q).dot(x - y); };
  f.grad = [M, q](const Vector& y, const Vector&) -> Vector { return M * y + q; };
  f.best_response = [M, q, set](const Vector& y, const Vector& t) -> Vector {
    Vector g = M * y + q;
    if (t.size() != 0) g += t;
    return linear_minimizer(set, g);
  };

  EpStructure ep;
  ep.source = "linear_vi";
  ep.skew_symmetric = sym.norm() == 0.0;
  ep.query_lipschitz = mn * (D + R) + q.norm();
  f.ep = ep;
  return f;
}

double DriftSchedule::at(long n) const {
  if (n < 1) throw InvalidArgument("drift schedule is indexed from 1");
  const double x = static_cast<double>(n);
  switch (kind) {
    case Kind::kZero: return 0.0;
    case Kind::kInverseSquare: return scale / (x * x);
    case Kind::kInverseSqrt: return scale / std::sqrt(x);
    case Kind::kConstant: return scale;
  }
  return 0.0;
}

double DriftSchedule::budget(long N) const {
  double s = 0.0;
  for (long n = 1; n <= N; ++n) s += at(n);
  return s;
}

DriftSchedule::Kind DriftSchedule::parse(const std::string& s) {
  if (s == "zero") return Kind::kZero;
  if (s == "inv_square") return Kind::kInverseSquare;
  if (s == "inv_sqrt") return Kind::kInverseSqrt;
  if (s == "constant") return Kind::kConstant;
  throw InvalidArgument("unknown drift schedule '" + s +
                        "' (expected zero|inv_square|inv_sqrt|constant)");
}

std::string DriftSchedule::name(Kind k) {
  switch (k) {
    case Kind::kZero: return "zero";
    case Kind::kInverseSquare: return "inv_square";
    case Kind::kInverseSqrt: return "inv_sqrt";
    case Kind::kConstant: return "constant";
  }
  return "zero";
}

PredictableSequence make_predictable(std::shared_ptr<const Bifunction> base,
                                     const DriftSchedule& schedule, std::uint64_t seed,
                                     long horizon) {
  if (!base) throw InvalidArgument("make_predictable: null base problem");
  if (horizon < 1) throw InvalidArgument("make_predictable: horizon must be >= 1");
  if (!(schedule.scale >= 0.0) || !std::isfinite(schedule.scale)) {
    throw InvalidArgument("make_predictable: drift scale must be >= 0");
  }
  const Index d = base->dim();
  PredictableSequence p;
  p.base = base;
  p.schedule = schedule;
  p.a.reserve(horizon);
  p.delta.reserve(horizon);
  Rng rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector delta = Vector::Zero(d);
  Vector u(d);
  for (long n = 1; n <= horizon; ++n) {
    do {
      for (Index i = 0; i < d; ++i) u[i] = n01(rng);
    } while (u.norm() == 0.0);
    const double an = schedule.at(n);
    delta += an * (u / u.norm());
    p.a.push_back(an);
    p.delta.push_back(delta);
  }
  return p;
}

Vector Environment::tilt(long n) const {
  if (tilts.empty()) return Vector();
  if (n < 1 || n > static_cast<long>(tilts.size())) {
    throw InvalidArgument("environment: round " + std::to_string(n) + " beyond the drift horizon");
  }
  return tilts[n - 1];
}

double Environment::drift_at(long n) const {
  if (drift.empty()) return 0.0;
  return drift.at(n - 1);
}

}  // namespace col
