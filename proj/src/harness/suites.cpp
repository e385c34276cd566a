#include "col/harness/suites.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "col/algorithms.hpp"
#include "col/bregman.hpp"
#include "col/imitation.hpp"
#include "col/metrics.hpp"
#include "col/oracles.hpp"
#include "col/problems.hpp"
#include "col/tolerances.hpp"

namespace col::harness {

bool SuiteReport::passed() const {
  for (const auto& i : items) {
    if (!i.holds) return false;
  }
  return true;
}

std::string SuiteReport::render() const {
  std::ostringstream os;
  for (const auto& i : items) {
    os << (i.holds ? "PASS " : "FAIL ") << suite << "/" << i.name << "  margin=" << i.margin;
    if (!i.detail.empty()) os << "  " << i.detail;
    os << '\n';
  }
  os << suite << ": " << (passed() ? "all checks passed" : "FAILED") << '\n';
  return os.str();
}

Bifunction reference_tracking(Index d) {
  return make_quadratic_tracking(2.0, 0.5, Vector::Zero(d), DecisionSet::cube(d, -1.0, 1.0));
}

Bifunction reference_imitation(bool grouped) {
  const TabularMDP mdp = random_mdp(3, 2, 5, 0);
  const PolicyMatrix expert = random_policy(3, 2, 1);
  ILOptions opt;
  opt.mu = 1.0;
  if (grouped) opt.groups = {0, 0, 1};
  return make_il_problem(mdp, expert, opt);
}

Bifunction reference_linear_vi() {
  Matrix M(2, 2);
  M << 0.5, 1.0, -1.0, 0.5;
  Vector q(2);
  q << 0.3, -0.2;
  return make_linear_vi(M, q, DecisionSet::cube(2, -1.0, 1.0));
}

namespace {

// Tracks the worst slack of a family of inequalities "slack >= -tol".
struct Worst {
  double slack = std::numeric_limits<double>::infinity();
  void add(double s) { slack = std::min(slack, s); }
  CheckItem item(const std::string& name, double tol, const std::string& detail = "") const {
    return {name, slack >= -tol, slack, detail};
  }
};

Vector randn(Index d, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = n01(rng);
  return v;
}

std::vector<DecisionSet> sample_sets() {
  Vector c(2);
  c << 0.3, -0.2;
  return {DecisionSet::cube(2, -1.0, 1.0), DecisionSet::ball(c, 0.7), DecisionSet::simplex(3),
          DecisionSet::product({DecisionSet::simplex(2), DecisionSet::cube(1, 0.0, 2.0)})};
}

SuiteReport geometry_suite() {
  SuiteReport rep{"geometry", {}};
  Rng rng(11);
  Worst idem, nonexp;
  for (const auto& set : sample_sets()) {
    for (int i = 0; i < 1000; ++i) {
      const Vector p = 3.0 * randn(set.dim(), rng);
      const Vector q = 3.0 * randn(set.dim(), rng);
      const Vector pp = project(set, p);
      idem.add(tol::kExact - (project(set, pp) - pp).norm());
      nonexp.add((p - q).norm() - (pp - project(set, q)).norm());
    }
  }
  rep.items.push_back(idem.item("projection_idempotent", 0.0));
  rep.items.push_back(nonexp.item("projection_nonexpansive", tol::kInequality));

  Worst zero_step;
  for (const auto& set : sample_sets()) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = sample_uniform(set, rng);
      const Vector g = randn(set.dim(), rng);
      zero_step.add(tol::kExact - (mirror_step(BregmanGeometry::euclidean(), set, x, g, 0.0) - x).norm());
    }
  }
  for (int i = 0; i < 100; ++i) {
    const DecisionSet s = DecisionSet::simplex(3);
    const Vector x = sample_uniform(s, rng);
    zero_step.add(tol::kExact -
                  (mirror_step(BregmanGeometry::entropy(), s, x, Vector(randn(3, rng)), 0.0) - x).norm());
  }
  rep.items.push_back(zero_step.item("mirror_step_zero_eta", 0.0));

  // Euclidean prox step against a grid argmin of <eta g, y> + |y - x|^2 / 2.
  // The exact minimizer can not lose to any grid point, and sits within one
  // cell diagonal of the grid winner.
  Worst grid_value, grid_agree;
  for (const auto& set : {DecisionSet::cube(2, -1.0, 1.0), DecisionSet::ball(Vector::Zero(2), 1.0),
                          DecisionSet::cube(1, -1.0, 1.0)}) {
    const auto pts = grid(set, 401);
    for (int i = 0; i < 5; ++i) {
      const Vector x = sample_uniform(set, rng);
      const Vector g = randn(set.dim(), rng);
      const double eta = 0.5;
      const Vector y = mirror_step(BregmanGeometry::euclidean(), set, x, g, eta);
      double best = std::numeric_limits<double>::infinity();
      Vector arg;
      for (const auto& p : pts) {
        const double v = eta * g.dot(p) + 0.5 * (p - x).squaredNorm();
        if (v < best) {
          best = v;
          arg = p;
        }
      }
      const double cell = 2.0 / 400.0 * std::sqrt(static_cast<double>(set.dim()));
      grid_value.add(best - (eta * g.dot(y) + 0.5 * (y - x).squaredNorm()));
      grid_agree.add(cell - (arg - y).norm());
    }
  }
  rep.items.push_back(grid_value.item("mirror_step_beats_grid", tol::kExact));
  rep.items.push_back(grid_agree.item("mirror_step_near_grid_argmin", 0.0));

  Worst nonneg, strong, euclid_self;
  const DecisionSet s3 = DecisionSet::simplex(3);
  for (int i = 0; i < 10000; ++i) {
    const Vector a = sample_uniform(s3, rng);
    const Vector b = sample_uniform(s3, rng);
    const double kl = bregman(BregmanGeometry::entropy(), a, b);
    nonneg.add(kl);
    strong.add(kl - 0.5 * std::pow((a - b).lpNorm<1>(), 2));
    euclid_self.add(tol::kExact - std::abs(bregman(BregmanGeometry::euclidean(), a, a)));
    euclid_self.add(tol::kExact - std::abs(bregman(BregmanGeometry::entropy(), a, a)));
  }
  rep.items.push_back(nonneg.item("bregman_nonnegative", tol::kExact));
  rep.items.push_back(strong.item("entropy_strongly_convex_l1", tol::kExact));
  rep.items.push_back(euclid_self.item("bregman_zero_on_diagonal", 0.0));
  return rep;
}

struct PairStats {
  double monotone = std::numeric_limits<double>::infinity();
  double smooth = std::numeric_limits<double>::infinity();
  double lipschitz_t = std::numeric_limits<double>::infinity();
};

PairStats pair_checks(const Bifunction& f, int pairs, std::uint64_t seed) {
  Rng rng(seed);
  PairStats s;
  const auto& r = f.reg;
  for (int i = 0; i < pairs; ++i) {
    const Vector x = sample_uniform(f.set, rng);
    const Vector y = sample_uniform(f.set, rng);
    const Vector gx = f.grad(x, x);
    const Vector gy = f.grad(y, y);
    const double d2 = (x - y).squaredNorm();
    s.monotone = std::min(s.monotone, (gx - gy).dot(x - y) - (r.alpha - r.beta) * d2);
    s.smooth = std::min(s.smooth, (r.gamma + r.beta) * std::sqrt(d2) - (gx - gy).norm());
    if (r.alpha > 0.0) {
      const double lhs = (best_response(f, x) - best_response(f, y)).norm();
      s.lipschitz_t = std::min(s.lipschitz_t, r.beta / r.alpha * std::sqrt(d2) - lhs);
    }
  }
  return s;
}

SuiteReport regularity_suite() {
  SuiteReport rep{"regularity", {}};
  const std::vector<std::pair<std::string, Bifunction>> certified = {
      {"tracking_d5", reference_tracking(5)},
      {"imitation", reference_imitation(false)},
      {"imitation_grouped", reference_imitation(true)},
      {"linear_vi", reference_linear_vi()}};
  for (const auto& [name, f] : certified) {
    const PairStats s = pair_checks(f, 10000, 5);
    rep.items.push_back({name + "_strong_monotonicity", s.monotone >= -tol::kInequality, s.monotone, ""});
    rep.items.push_back({name + "_joint_smoothness", s.smooth >= -tol::kInequality, s.smooth, ""});
  }

  Vector a(2);
  a << 0.2, -0.4;
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  const std::vector<std::pair<std::string, Bifunction>> all = {
      {"tracking", reference_tracking(3)},
      {"rotation", make_rotation(1.0, 0.5, 1.0)},
      {"convex_opt", make_convex_opt(squared_distance(a, DecisionSet::cube(2, -1, 1)), DecisionSet::cube(2, -1, 1))},
      {"matrix_game", make_matrix_game(A)},
      {"linear_vi", reference_linear_vi()},
      {"imitation", reference_imitation(false)}};
  for (const auto& [name, f] : all) {
    const double err = gradient_check(f, 200, 3);
    rep.items.push_back({name + "_gradient_finite_difference", err <= 1e-6, 1e-6 - err, ""});
  }

  const Regularity est = estimate_regularity(reference_tracking(2), 10000, 9);
  const double worst = std::max({std::abs(est.alpha - 2.0) / 2.0, std::abs(est.beta - 1.0),
                                 std::abs(est.gamma - 2.0) / 2.0});
  std::ostringstream d;
  d << "alpha=" << est.alpha << " beta=" << est.beta << " gamma=" << est.gamma;
  rep.items.push_back({"estimate_within_5pct", worst <= 0.05, 0.05 - worst, d.str()});
  return rep;
}

SuiteReport residuals_suite() {
  SuiteReport rep{"residuals", {}};
  Rng rng(21);
  Vector a(2);
  a << 0.2, -0.4;
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  const std::vector<std::pair<std::string, Bifunction>> eps = {
      {"convex_opt", make_convex_opt(squared_distance(a, DecisionSet::cube(2, -1, 1)), DecisionSet::cube(2, -1, 1))},
      {"matrix_game", make_matrix_game(A)},
      {"linear_vi", reference_linear_vi()}};
  for (const auto& [name, f] : eps) {
    Worst diag, mono, skew, order1, order2, conv;
    const double L = f.ep->query_lipschitz;
    const double D = diameter(f.set);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = sample_uniform(f.set, rng);
      const Vector y = sample_uniform(f.set, rng);
      diag.add(tol::kExact - std::abs(f.eval(x, x)));
      mono.add(-(f.eval(x, y) + f.eval(y, x)));
      if (f.ep->skew_symmetric) skew.add(tol::kInequality - std::abs(f.eval(x, y) + f.eval(y, x)));
    }
    for (int i = 0; i < 100; ++i) {
      const Vector xh = sample_uniform(f.set, rng);
      const double g = gap(f, xh);
      const double rd = dual_residual(f, xh);
      const double dv = dvi_residual(f, xh);
      order1.add(rd - dv + tol::kGrid);
      order2.add(g - rd + tol::kGrid);
      if (rd <= 2.0 * L * D) conv.add(2.0 * std::sqrt(2.0 * L * D * std::max(rd, 0.0)) - g);
      if (f.ep->skew_symmetric) conv.add(2.0 * tol::kGrid - std::abs(g - rd));
    }
    rep.items.push_back(diag.item(name + "_phi_vanishes_on_diagonal", 0.0));
    rep.items.push_back(mono.item(name + "_monotone", tol::kInequality));
    if (f.ep->skew_symmetric) rep.items.push_back(skew.item(name + "_skew_symmetric", 0.0));
    rep.items.push_back(order1.item(name + "_dvi_below_dual", 0.0));
    rep.items.push_back(order2.item(name + "_dual_below_gap", 0.0));
    rep.items.push_back(conv.item(name + "_dual_to_primal", tol::kGrid));
  }

  // Small gap forces closeness to the best response.
  {
    const Bifunction f = reference_tracking(2);
    Worst near;
    for (int i = 0; i < 1000; ++i) {
      const Vector x = sample_uniform(f.set, rng) * 1e-2;
      const double eps = gap(f, x);
      near.add(std::sqrt(2.0 * eps / f.reg.alpha) + tol::kExact - (x - best_response(f, x)).norm());
    }
    rep.items.push_back(near.item("near_fixed_point", tol::kExact));
  }

  // Ball-constrained equilibrium: the operator pushes along the outward normal.
  {
    Vector c(2);
    c << 1.5, 0.5;
    const double r = 1.0;
    const Bifunction f = make_quadratic_tracking(2.0, 0.5, c, DecisionSet::ball(Vector::Zero(2), r));
    const auto cert = find_equilibrium(f, 1e-13);
    const Vector F = f.grad(cert.x_star, cert.x_star);
    Worst sc;
    for (int i = 0; i < 1000; ++i) {
      const Vector x = sample_uniform(f.set, rng);
      const double lhs = F.dot(x - cert.x_star);
      const double rhs = (x - cert.x_star).squaredNorm() * F.norm() / (2.0 * r);
      sc.add(lhs - rhs);
    }
    rep.items.push_back(sc.item("strongly_convex_set", 1e-9));
  }
  return rep;
}

SuiteReport contraction_suite() {
  SuiteReport rep{"contraction", {}};
  const Bifunction f = reference_tracking(2);
  const BregmanGeometry geom = BregmanGeometry::euclidean();
  for (double eta : {0.05, 0.1, 0.2}) {
    RunSpec s;
    s.kind = AlgorithmKind::kMirrorDescent;
    s.schedule = StepSchedule::constant(eta);
    s.horizon = 200;
    Vector x1(2);
    x1 << 1.0, -0.6;
    s.initial = x1;
    const RunTrace t = run(Environment::col(std::make_shared<Bifunction>(f)), s);
    const double bound = mirror_descent_contraction(f.reg, geom, eta);
    Worst w;
    for (double r : bregman_ratios(t, Vector::Zero(2))) w.add(bound - r);
    std::ostringstream d;
    d << "eta=" << eta << " factor=" << bound;
    rep.items.push_back(w.item("mirror_descent_ratio_eta_" + format_double(eta), 1e-9, d.str()));
  }
  const PairStats s = pair_checks(f, 10000, 31);
  rep.items.push_back({"best_response_lipschitz", s.lipschitz_t >= -1e-9, s.lipschitz_t, ""});

  // Midpoint on the rotation: |x_n| strictly decreases.
  const Bifunction rot = make_rotation(1.0, std::acos(-1.0) / 6.0, 1.0);
  RunSpec m;
  m.kind = AlgorithmKind::kMidpoint;
  m.horizon = 100;
  Vector x1(2);
  x1 << 1.0, 0.0;
  m.initial = x1;
  const RunTrace t = run(Environment::col(std::make_shared<Bifunction>(rot)), m);
  Worst dec;
  for (std::size_t i = 1; i < t.rows.size(); ++i) dec.add(t.rows[i - 1].x.norm() - t.rows[i].x.norm());
  rep.items.push_back({"midpoint_rotation_decreasing", dec.slack > 0.0, dec.slack, ""});
  return rep;
}

SuiteReport theorems_suite() {
  SuiteReport rep{"theorems", {}};
  auto f = std::make_shared<Bifunction>(reference_tracking(2));
  const auto cert = find_equilibrium(*f);
  Vector x1(2);
  x1 << 1.0, 0.0;
  std::vector<std::pair<std::string, RunSpec>> specs;
  RunSpec g;
  g.kind = AlgorithmKind::kGreedy;
  g.horizon = 200;
  g.initial = x1;
  g.equilibrium = cert;
  specs.push_back({"greedy", g});
  RunSpec md = g;
  md.kind = AlgorithmKind::kMirrorDescent;
  md.schedule = StepSchedule::constant(0.2);
  specs.push_back({"mirror_descent", md});
  RunSpec mdn = md;
  mdn.schedule = StepSchedule::inverse_sqrt(1.0);
  mdn.feedback.mode = FeedbackSpec::Mode::kStochastic;
  mdn.feedback.sigma = 0.5;
  mdn.seed = 3;
  specs.push_back({"mirror_descent_noisy", mdn});
  for (const auto& [name, spec] : specs) {
    const RunTrace t = run(Environment::col(f), spec);
    for (BoundKind k : {BoundKind::kDynamicRegretUpper, BoundKind::kDynamicRegretLower,
                        BoundKind::kLinearizedStaticReduction, BoundKind::kPathVariation}) {
      const BoundReport b = check_theorem_bounds(t, *f, k, tol::kExact);
      rep.items.push_back({name + "_" + bound_name(k), b.holds, b.min_slack, ""});
    }
    Worst sd;
    for (const auto& r : t.rows) sd.add(r.dynamic_regret_cum - r.static_regret_cum);
    rep.items.push_back(sd.item(name + "_static_below_dynamic", tol::kExact));
  }

  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  auto game = std::make_shared<Bifunction>(make_matrix_game(A));
  RunSpec mg;
  mg.kind = AlgorithmKind::kMirrorDescent;
  mg.geometry = BregmanGeometry::entropy();
  mg.schedule = StepSchedule::inverse_sqrt(1.0);
  mg.horizon = 2000;
  Vector u(4);
  u << 0.8, 0.2, 0.3, 0.7;
  mg.initial = u;
  const RunTrace t = run(Environment::col(game), mg);
  const BoundReport b = check_theorem_bounds(t, *game, BoundKind::kDualResidualByStaticRegret, 1e-9);
  rep.items.push_back({"matrix_game_dual_residual_by_static_regret", b.holds, b.min_slack, ""});
  return rep;
}

SuiteReport predictable_suite() {
  SuiteReport rep{"predictable", {}};
  auto base = std::make_shared<Bifunction>(
      make_quadratic_tracking(2.0, 0.2, Vector::Zero(2), DecisionSet::cube(2, -1.0, 1.0)));
  for (auto kind : {DriftSchedule::Kind::kInverseSqrt, DriftSchedule::Kind::kInverseSquare,
                    DriftSchedule::Kind::kConstant}) {
    DriftSchedule sch{kind, kind == DriftSchedule::Kind::kConstant ? 0.01 : 1.0};
    const PredictableSequence p = make_predictable(base, sch, 17, 2000);
    // Gradient drift decomposes into the query term and the tilt increment.
    Rng rng(5);
    Worst def;
    double budget = 0.0;
    for (long n = 2; n <= 2000; ++n) {
      const Vector xp = sample_uniform(base->set, rng);
      const Vector xc = sample_uniform(base->set, rng);
      const Vector z = sample_uniform(base->set, rng);
      const double lhs = (round_grad(*base, xc, p.delta[n - 1], z) - round_grad(*base, xp, p.delta[n - 2], z)).norm();
      def.add(base->reg.beta * (xc - xp).norm() + p.a[n - 1] - lhs);
    }
    for (double a : p.a) budget += a;
    rep.items.push_back(def.item("drift_bound_" + DriftSchedule::name(kind), 1e-12));
    const double err = std::abs(budget - sch.budget(2000));
    rep.items.push_back({"budget_" + DriftSchedule::name(kind), err <= 1e-9, 1e-9 - err, ""});

    RunSpec s;
    s.kind = AlgorithmKind::kMirrorDescent;
    s.schedule = StepSchedule::constant(predictable_step(base->reg, BregmanGeometry::euclidean()));
    s.horizon = 2000;
    const RunTrace t = run(Environment::predictable(p), s);
    const BoundReport b = check_theorem_bounds(t, *base, BoundKind::kPredictableContraction, 1e-9);
    rep.items.push_back({"best_response_drift_" + DriftSchedule::name(kind), b.holds, b.min_slack, ""});
  }
  return rep;
}

SuiteReport imitation_suite() {
  SuiteReport rep{"imitation", {}};
  Rng rng(41);
  const TabularMDP mdp = random_mdp(4, 3, 6, 2);
  Worst dist;
  for (int i = 0; i < 200; ++i) {
    const PolicyMatrix pi = random_policy(4, 3, 1000 + i);
    const Vector d = state_distribution(mdp, pi);
    dist.add(tol::kExact - std::abs(d.sum() - 1.0));
    dist.add(d.minCoeff());
  }
  rep.items.push_back(dist.item("state_distribution_is_distribution", 0.0));

  for (bool grouped : {false, true}) {
    const Bifunction f = reference_imitation(grouped);
    const std::string tag = grouped ? "grouped_" : "";
    const double err = gradient_check(f, 200, 4);
    rep.items.push_back({tag + "gradient_finite_difference", err <= 1e-6, 1e-6 - err, ""});
    const auto cert = find_equilibrium(f, 1e-13);
    rep.items.push_back({tag + "equilibrium_gap", cert.gap_value <= 1e-10, 1e-10 - cert.gap_value,
                         cert.method_name()});
    const double eta = (f.reg.alpha - f.reg.beta) / std::pow(f.reg.gamma + f.reg.beta, 2);
    const ILConvergenceReport r = il_convergence_check(f, eta, 200, center(f.set));
    std::ostringstream d;
    d << "beta=" << f.reg.beta << " bound=" << r.bound << " max_ratio=" << r.max_ratio;
    rep.items.push_back({tag + "linear_convergence", r.holds, r.bound - r.max_ratio, d.str()});
  }
  return rep;
}

const std::map<std::string, std::function<SuiteReport()>>& registry() {
  static const std::map<std::string, std::function<SuiteReport()>> r = {
      {"geometry", geometry_suite},       {"regularity", regularity_suite},
      {"residuals", residuals_suite},     {"contraction", contraction_suite},
      {"theorems", theorems_suite},       {"predictable", predictable_suite},
      {"imitation", imitation_suite}};
  return r;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"geometry", "regularity", "residuals", "contraction", "theorems", "predictable", "imitation"};
}

SuiteReport check_suite(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    std::string list;
    for (const auto& n : suite_names()) list += (list.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown suite '" + name + "'; available: " + list);
  }
  return it->second();
}

}  // namespace col::harness
