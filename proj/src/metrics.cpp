#include "col/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "col/oracles.hpp"

namespace col {

namespace {

long prefix(const RunTrace& t, long N) {
  if (N < 0) return t.size();
  if (N > t.size()) throw InvalidArgument("prefix length beyond the trace");
  return N;
}

}  // namespace

double dynamic_regret(const RunTrace& trace, long N) {
  const long m = prefix(trace, N);
  double s = 0.0;
  for (long i = 0; i < m; ++i) s += trace.rows[i].gap;
  return s;
}

double static_regret(const RunTrace& trace, const Bifunction& f,
                     const std::optional<Vector>& comparator, long N) {
  std::vector<double> w(static_cast<std::size_t>(prefix(trace, N)), 1.0);
  if (!comparator) return weighted_static_regret(trace, f, w, N);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& r = trace.rows[i];
    s += r.loss - round_loss(f, r.x, r.tilt, *comparator);
  }
  return s;
}

double weighted_static_regret(const RunTrace& trace, const Bifunction& f,
                              const std::vector<double>& weights, long N) {
  const long m = prefix(trace, N);
  if (static_cast<long>(weights.size()) < m) throw InvalidArgument("fewer weights than rounds");
  auto acc = make_cumulative(f);
  double played = 0.0;
  for (long i = 0; i < m; ++i) {
    const double w = weights[i];
    if (!(w > 0.0)) throw InvalidArgument("weights must be positive");
    const auto& r = trace.rows[i];
    played += w * r.loss;
    acc->add(r.x, r.tilt, w);
  }
  return played - acc->min_value();
}

Vector averaged_iterate(const RunTrace& trace, const std::vector<double>& weights, long N) {
  const long m = prefix(trace, N);
  if (m == 0) throw InvalidArgument("averaged_iterate of an empty trace");
  Vector acc = Vector::Zero(trace.rows[0].x.size());
  double total = 0.0;
  for (long i = 0; i < m; ++i) {
    const double w = weights.empty() ? 1.0 : weights.at(i);
    if (!(w >= 0.0)) throw InvalidArgument("weights must be nonnegative");
    acc += w * trace.rows[i].x;
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("weights sum to zero");
  return acc / total;
}

SlopeFit loglog_slope(const std::vector<double>& n, const std::vector<double>& y, double lo,
                      double hi) {
  if (n.size() != y.size()) throw DimensionMismatch("loglog_slope: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < lo || n[i] > hi || !(y[i] > 0.0) || !(n[i] > 0.0)) continue;
    const double lx = std::log(n[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  SlopeFit fit;
  fit.points = k;
  if (k < 2) {
    fit.slope = std::nan("");
    fit.intercept = std::nan("");
    return fit;
  }
  const double kd = static_cast<double>(k);
  const double den = kd * sxx - sx * sx;
  fit.slope = den > 0.0 ? (kd * sxy - sx * sy) / den : std::nan("");
  fit.intercept = (sy - fit.slope * sx) / kd;
  return fit;
}

SlopeFit last_decade_slope(const std::vector<double>& n, const std::vector<double>& y) {
  if (n.empty()) return loglog_slope(n, y, 0, 0);
  const double N = *std::max_element(n.begin(), n.end());
  return loglog_slope(n, y, N / 10.0, N);
}

std::string bound_name(BoundKind k) {
  switch (k) {
    case BoundKind::kDynamicRegretUpper: return "dynamic_regret_upper";
    case BoundKind::kDynamicRegretLower: return "dynamic_regret_lower";
    case BoundKind::kDualResidualByStaticRegret: return "dual_residual_by_static_regret";
    case BoundKind::kLinearizedStaticReduction: return "linearized_static_reduction";
    case BoundKind::kPathVariation: return "path_variation";
    case BoundKind::kPredictableContraction: return "predictable_contraction";
  }
  return "?";
}

namespace {

void record(BoundReport& rep, double slack, long n, double tol) {
  if (rep.rounds_checked == 0 || slack < rep.min_slack) {
    rep.min_slack = slack;
    rep.worst_round = n;
  }
  rep.slack.push_back(slack);
  ++rep.rounds_checked;
  if (slack < -tol) rep.holds = false;
}

const Vector& require_equilibrium(const RunTrace& t) {
  if (!t.equilibrium) throw MissingCertificate("bound needs an equilibrium certificate on the trace");
  return t.equilibrium->x_star;
}

void require_plain_col(const RunTrace& t) {
  for (const auto& r : t.rows) {
    if (r.tilt.size() != 0) throw InvalidArgument("bound applies to problems without drift");
  }
}

}  // namespace

BoundReport check_theorem_bounds(const RunTrace& trace, const Bifunction& f, BoundKind which,
                                 double tol, const std::vector<long>& checkpoints) {
  BoundReport rep;
  rep.kind = which;
  const auto& reg = f.reg;
  const double D = diameter(f.set);
  std::vector<char> want(trace.rows.size() + 1, checkpoints.empty() ? 1 : 0);
  for (long c : checkpoints) {
    if (c >= 1 && c <= trace.size()) want[c] = 1;
  }

  switch (which) {
    case BoundKind::kDynamicRegretUpper: {
      const Vector& xs = require_equilibrium(trace);
      require_plain_col(trace);
      double dyn = 0, g_sum = 0, static_star = 0, tail = 0;
      for (const auto& r : trace.rows) {
        const double delta = (r.x - xs).norm();
        dyn += r.gap;
        g_sum += reg.G * delta;
        static_star += r.loss - f.eval(r.x, xs);
        const double quad = reg.alpha > 0.0 ? reg.beta * reg.beta / (2.0 * reg.alpha) * delta * delta
                                            : std::numeric_limits<double>::infinity();
        tail += std::min(reg.beta * D * delta, quad);
        if (want[r.n]) record(rep, std::min(g_sum, static_star) + tail - dyn, r.n, tol);
      }
      break;
    }
    case BoundKind::kDynamicRegretLower: {
      const Vector& xs = require_equilibrium(trace);
      require_plain_col(trace);
      double dyn = 0, lower = 0;
      for (const auto& r : trace.rows) {
        dyn += r.gap;
        lower += 0.5 * reg.alpha * (r.best_response - xs).squaredNorm();
        if (want[r.n]) record(rep, dyn - lower, r.n, tol);
      }
      break;
    }
    case BoundKind::kDualResidualByStaticRegret: {
      if (!f.ep) throw MissingCertificate("bound needs a monotone equilibrium problem");
      require_plain_col(trace);
      Vector sum = Vector::Zero(trace.dim);
      for (const auto& r : trace.rows) {
        sum += r.x;
        if (!want[r.n]) continue;
        const double N = static_cast<double>(r.n);
        const Vector x_hat = sum / N;
        record(rep, r.static_regret_cum / N - dual_residual(f, x_hat), r.n, tol);
      }
      break;
    }
    case BoundKind::kLinearizedStaticReduction: {
      const Vector& xs = require_equilibrium(trace);
      require_plain_col(trace);
      if (!(reg.alpha > reg.beta)) throw InvalidArgument("linearized reduction needs alpha > beta");
      const double c = reg.beta * reg.beta / (2.0 * reg.alpha * (reg.alpha - reg.beta));
      double dyn = 0, static_star = 0, linear = 0;
      for (const auto& r : trace.rows) {
        dyn += r.gap;
        static_star += r.loss - f.eval(r.x, xs);
        linear += f.grad(r.x, r.x).dot(r.x - xs);
        if (want[r.n]) record(rep, static_star + c * linear - dyn, r.n, tol);
      }
      break;
    }
    case BoundKind::kPathVariation: {
      if (!(reg.alpha > 0.0)) throw InvalidArgument("path variation bound needs alpha > 0");
      double lhs = 0, rhs = 0;
      for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        const auto& prev = trace.rows[i - 1];
        const auto& cur = trace.rows[i];
        lhs += (cur.best_response - prev.best_response).norm();
        rhs += reg.beta / reg.alpha * (cur.x - prev.x).norm() + cur.drift / reg.alpha;
        if (want[cur.n]) record(rep, rhs - lhs, cur.n, tol);
      }
      break;
    }
    case BoundKind::kPredictableContraction: {
      if (!(reg.alpha > 0.0)) throw InvalidArgument("predictable contraction needs alpha > 0");
      for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        const auto& prev = trace.rows[i - 1];
        const auto& cur = trace.rows[i];
        const double lhs = (cur.best_response - prev.best_response).norm();
        const double rhs = reg.beta / reg.alpha * (cur.x - prev.x).norm() + cur.drift / reg.alpha;
        if (want[cur.n]) record(rep, rhs - lhs, cur.n, tol);
      }
      break;
    }
  }
  return rep;
}

std::vector<double> bregman_ratios(const RunTrace& trace, const Vector& x_star, double floor) {
  std::vector<double> out;
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    const double den = 0.5 * (trace.rows[i - 1].x - x_star).squaredNorm();
    if (den <= floor) continue;
    out.push_back(0.5 * (trace.rows[i].x - x_star).squaredNorm() / den);
  }
  return out;
}

}  // namespace col
