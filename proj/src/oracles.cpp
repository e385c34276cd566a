#include "col/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace col {

Vector best_response(const Bifunction& f, const Vector& x, const Vector& tilt, double tol,
                     int max_iter) {
  if (x.size() != f.dim()) throw DimensionMismatch("best_response: query dimension mismatch");
  if (f.best_response) return f.best_response(x, tilt);
  if (f.linear_in_decision) return linear_minimizer(f.set, round_grad(f, x, tilt, x));

  const double alpha = f.reg.alpha;
  const double threshold = alpha > 0.0 ? std::sqrt(2.0 * alpha * tol) : std::sqrt(tol);
  double step = f.reg.gamma > 0.0 ? 1.0 / f.reg.gamma : 1.0;
  Vector z = project(f.set, x);
  double fz = round_loss(f, x, tilt, z);
  for (int it = 0; it < max_iter; ++it) {
    const Vector g = round_grad(f, x, tilt, z);
    Vector y;
    double fy;
    while (true) {
      y = project(f.set, Vector(z - step * g));
      fy = round_loss(f, x, tilt, y);
      const Vector d = y - z;
      if (fy <= fz + g.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15 || step < 1e-14) break;
      step *= 0.5;
    }
    const double mapping = (z - y).norm() / step;
    z = y;
    fz = fy;
    if (mapping <= threshold) return z;
  }
  throw ConvergenceFailure("best_response: projected gradient did not converge for '" + f.name +
                           "'");
}

double gap(const Bifunction& f, const Vector& x, const Vector& tilt, double tol) {
  const Vector xs = best_response(f, x, tilt, tol);
  return round_loss(f, x, tilt, x) - round_loss(f, x, tilt, xs);
}

std::string EquilibriumCertificate::method_name() const {
  switch (method) {
    case Method::kFixedPointIteration: return "fixed_point_iteration";
    case Method::kGapMinimization: return "gap_minimization";
    case Method::kClosedForm: return "closed_form";
  }
  return "?";
}

Vector compass_search(const DecisionSet& set, const std::function<double(const Vector&)>& objective,
                      Vector x0, double step0, double min_step, int max_evals) {
  Vector x = project(set, x0);
  double fx = objective(x);
  double step = step0;
  int evals = 1;
  const Index d = x.size();
  while (step > min_step && evals < max_evals) {
    bool improved = false;
    for (Index i = 0; i < d && !improved; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vector y = x;
        y[i] += sgn * step;
        y = project(set, y);
        const double fy = objective(y);
        ++evals;
        if (fy < fx) {
          x = y;
          fx = fy;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

namespace {

void require_grid(const DecisionSet& set, const char* what) {
  if (set.intrinsic_dim() > 3) {
    throw GridUnsupported(std::string(what) + ": grid search needs intrinsic dimension <= 3, got " +
                          std::to_string(set.intrinsic_dim()));
  }
}

// Maximizes `obj` over the set: grid scan, then compass polish of the best few points.
double grid_maximize(const DecisionSet& set, const std::function<double(const Vector&)>& obj,
                     Index points_per_dim) {
  const auto pts = grid(set, points_per_dim);
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = obj(pts[i]);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t starts = std::min<std::size_t>(4, order.size());
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  double best = vals[order[0]];
  const double h = diameter(set) / static_cast<double>(points_per_dim - 1);
  auto neg = [&](const Vector& x) { return -obj(x); };
  for (std::size_t s = 0; s < starts; ++s) {
    const Vector x = compass_search(set, neg, pts[order[s]], h, 1e-10);
    best = std::max(best, obj(x));
  }
  return best;
}

}  // namespace

EquilibriumCertificate find_equilibrium(const Bifunction& f, double tol, int max_iter,
                                        Index grid_points_per_dim) {
  EquilibriumCertificate cert;
  if (f.known_equilibrium) {
    cert.x_star = *f.known_equilibrium;
    cert.method = EquilibriumCertificate::Method::kClosedForm;
    cert.gap_value = gap(f, cert.x_star);
    cert.certified = true;
    return cert;
  }
  if (f.reg.beta < f.reg.alpha) {
    Vector x = center(f.set);
    for (long it = 1; it <= max_iter; ++it) {
      const Vector t = best_response(f, x, Vector(), std::min(tol * tol, tol::kOracle));
      const double move = (t - x).norm();
      x = t;
      if (move <= tol) {
        cert.x_star = x;
        cert.method = EquilibriumCertificate::Method::kFixedPointIteration;
        cert.iterations = it;
        cert.gap_value = gap(f, x);
        cert.certified = f.reg.alpha_certified && f.reg.beta_certified;
        return cert;
      }
    }
    throw ConvergenceFailure("find_equilibrium: fixed-point iteration hit the iteration cap");
  }
  if (f.set.intrinsic_dim() > 3) {
    throw NoCertifiedRoute("find_equilibrium: beta >= alpha in intrinsic dimension " +
                           std::to_string(f.set.intrinsic_dim()) +
                           " with no closed form; supply the equilibrium explicitly");
  }
  auto rho = [&](const Vector& x) { return gap(f, x); };
  const auto pts = grid(f.set, grid_points_per_dim);
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = rho(pts[i]);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t starts = std::min<std::size_t>(5, order.size());
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  const double h = diameter(f.set) / static_cast<double>(grid_points_per_dim - 1);
  Vector best = pts[order[0]];
  double best_val = vals[order[0]];
  for (std::size_t s = 0; s < starts; ++s) {
    const Vector x = compass_search(f.set, rho, pts[order[s]], h, std::min(tol, 1e-10));
    const double v = rho(x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }
  cert.x_star = best;
  cert.gap_value = best_val;
  cert.method = EquilibriumCertificate::Method::kGapMinimization;
  cert.iterations = static_cast<long>(pts.size());
  cert.certified = false;
  return cert;
}

double dual_residual(const Bifunction& f, const Vector& x_hat, Index grid_points_per_dim) {
  if (!f.ep) throw InvalidArgument("dual_residual: '" + f.name + "' is not an equilibrium problem");
  if (x_hat.size() != f.dim()) throw DimensionMismatch("dual_residual: dimension mismatch");
  if (f.ep->dual_residual) return f.ep->dual_residual(x_hat);
  require_grid(f.set, "dual_residual");
  return grid_maximize(f.set, [&](const Vector& x) { return f.eval(x, x_hat); },
                       grid_points_per_dim);
}

double dvi_residual(const Bifunction& f, const Vector& x_hat, Index grid_points_per_dim) {
  if (x_hat.size() != f.dim()) throw DimensionMismatch("dvi_residual: dimension mismatch");
  require_grid(f.set, "dvi_residual");
  return grid_maximize(f.set, [&](const Vector& x) { return f.grad(x, x).dot(x_hat - x); },
                       grid_points_per_dim);
}

}  // namespace col
