#include <cmath>

#include "col/algorithms.hpp"
#include "col/errors.hpp"
#include "col/problems.hpp"
#include "util.hpp"

using namespace col;
using testutil::check_close;
using testutil::vec;

namespace {

std::shared_ptr<Bifunction> qt(double lambda = 0.5, Index d = 2) {
  return std::make_shared<Bifunction>(
      make_quadratic_tracking(2.0, lambda, Vector::Zero(d), DecisionSet::cube(d, -1, 1)));
}

AlgorithmState state(Vector x, StepSchedule s = StepSchedule::constant(0.1),
                     BregmanGeometry g = BregmanGeometry::euclidean()) {
  return {std::move(x), 1, g, s};
}

RunSpec spec(AlgorithmKind k, long N, Vector x1) {
  RunSpec s;
  s.kind = k;
  s.horizon = N;
  s.initial = std::move(x1);
  return s;
}

}  // namespace

TEST_CASE("greedy decays geometrically at rate lambda") {
  const auto f = qt();
  const RunTrace t = run(Environment::col(f), spec(AlgorithmKind::kGreedy, 10, vec({1, 0})));
  REQUIRE(t.size() == 10);
  for (long n = 1; n <= 10; ++n) check_close(t.rows[n - 1].x, vec({std::pow(0.5, n - 1), 0}), 1e-15);
}

TEST_CASE("greedy on an offline problem converges in one step") {
  auto f = std::make_shared<Bifunction>(make_quadratic_tracking(2.0, 0.0, vec({1.4, 0.2}), DecisionSet::cube(2, -1, 1)));
  const RunTrace t = run(Environment::col(f), spec(AlgorithmKind::kGreedy, 3, vec({-1, -1})));
  check_close(t.rows[1].x, vec({1.0, 0.2}), 1e-15);
  check_close(t.rows[2].x, vec({1.0, 0.2}), 1e-15);
}

TEST_CASE("updates leave the equilibrium fixed") {
  const auto f = qt();
  for (auto k : {AlgorithmKind::kGreedy, AlgorithmKind::kMann, AlgorithmKind::kMirrorDescent,
                 AlgorithmKind::kMidpoint}) {
    RunSpec s = spec(k, 5, vec({0, 0}));
    s.schedule = StepSchedule::constant(0.3);
    const RunTrace t = run(Environment::col(f), s);
    for (const auto& r : t.rows) CHECK(r.x.norm() == 0.0);
  }
}

TEST_CASE("Mann step closed form and endpoints") {
  const auto f = qt(0.5, 1);
  auto s = state(vec({1}), StepSchedule::constant(0.5));
  // 0.5 * 1 + 0.5 * T(1) = 0.5 + 0.25.
  check_close(mann_step(s, *f), vec({0.75}), 1e-15);

  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Vector x = sample_uniform(f->set, rng);
    auto g0 = state(x);
    auto m0 = state(x, StepSchedule::constant(0.0));
    check_close(mann_step(m0, *f), greedy_step(g0, *f), 0.0);
    auto m1 = state(x, StepSchedule::constant(1.0));
    check_close(mann_step(m1, *f), x, 0.0);
  }
}

TEST_CASE("mirror descent first step") {
  const auto f = qt();
  auto s = state(vec({1, 0}), StepSchedule::constant(0.2));
  // grad f_x(x) = x here, so the step is (1 - eta) x.
  check_close(mirror_descent_step(s, *f, f->grad(vec({1, 0}), vec({1, 0}))), vec({0.8, 0}), 1e-15);
}

TEST_CASE("midpoint contracts by (1 + lambda)/2") {
  const auto f = qt(0.5, 1);
  auto s = state(vec({0.8}));
  check_close(midpoint_step(s, *f), vec({0.6}), 1e-15);
}

TEST_CASE("midpoint on the rotation strictly decreases the norm") {
  auto f = std::make_shared<Bifunction>(make_rotation(1.0, std::acos(-1.0) / 6.0, 1.0));
  const RunTrace t = run(Environment::col(f), spec(AlgorithmKind::kMidpoint, 60, vec({1, 0})));
  for (long n = 1; n < t.size(); ++n) CHECK(t.rows[n].x.norm() < t.rows[n - 1].x.norm());
  // |(I + Q)/2| = cos 15 degrees.
  const double c = std::cos(std::acos(-1.0) / 12.0);
  CHECK(t.rows[59].x.norm() == doctest::Approx(std::pow(c, 59)).epsilon(1e-10));
}

TEST_CASE("lambda trap") {
  auto f = std::make_shared<Bifunction>(make_reflected_expansion());
  auto s = state(vec({0.2}));
  check_close(lambda_trap_step(s, *f, 2.0), vec({0.2}), 1e-15);
  // lambda = 0 is greedy.
  auto a = state(vec({0.5}));
  auto b = state(vec({0.5}));
  check_close(lambda_trap_step(a, *f, 0.0), greedy_step(b, *f), 0.0);
  // (lambda x + T(x)) / (1 + lambda) with lambda = 2 from 0.5: (1 - 0.4) / 3.
  auto c = state(vec({0.5}));
  check_close(lambda_trap_step(c, *f, 2.0), vec({0.2}), 1e-15);
}

TEST_CASE("mirror descent with entropy keeps a symmetric game at uniform play") {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  auto f = std::make_shared<Bifunction>(make_matrix_game(A));
  RunSpec s = spec(AlgorithmKind::kMirrorDescent, 20, vec({0.5, 0.5, 0.5, 0.5}));
  s.geometry = BregmanGeometry::entropy();
  s.schedule = StepSchedule::inverse_sqrt(1.0);
  for (const auto& r : run(Environment::col(f), s).rows) check_close(r.x, vec({0.5, 0.5, 0.5, 0.5}), 1e-15);
}

TEST_CASE("step constants") {
  const auto f = qt();
  const auto E = BregmanGeometry::euclidean();
  // 2 (alpha - beta) / (L (gamma + beta)^2) = 2/9.
  CHECK(mirror_descent_step_limit(f->reg, E) == doctest::Approx(2.0 / 9.0));
  CHECK(mirror_descent_optimal_step(f->reg, E) == doctest::Approx(1.0 / 9.0));
  CHECK(mirror_descent_contraction(f->reg, E, 0.2) == doctest::Approx(1.0 - 0.4 + 0.04 * 9.0));
  CHECK_THROWS(mirror_descent_step_limit(f->reg, BregmanGeometry::entropy()));
  // alpha / (2 L gamma^2)
  CHECK(predictable_step(f->reg, E) == doctest::Approx(2.0 / 8.0));
}

TEST_CASE("step schedules") {
  CHECK(StepSchedule::constant(0.3).at(17) == 0.3);
  CHECK(StepSchedule::inverse_sqrt(2.0).at(4) == doctest::Approx(1.0));
}

TEST_CASE("validation rejects inconsistent runs before any round") {
  const auto f = qt();
  const auto env = Environment::col(f);
  RunSpec bad_mann = spec(AlgorithmKind::kMann, 5, vec({1, 0}));
  bad_mann.schedule = StepSchedule::constant(1.5);
  CHECK_THROWS_AS(run(env, bad_mann), InvalidArgument);

  RunSpec noisy_greedy = spec(AlgorithmKind::kGreedy, 5, vec({1, 0}));
  noisy_greedy.feedback.mode = FeedbackSpec::Mode::kStochastic;
  noisy_greedy.feedback.sigma = 0.1;
  CHECK_THROWS_AS(run(env, noisy_greedy), InvalidArgument);

  RunSpec entropy_box = spec(AlgorithmKind::kMirrorDescent, 5, vec({1, 0}));
  entropy_box.geometry = BregmanGeometry::entropy();
  CHECK_THROWS_AS(run(env, entropy_box), InvalidArgument);

  RunSpec trap_2d = spec(AlgorithmKind::kLambdaTrap, 5, vec({1, 0}));
  trap_2d.trap_lambda = 1.0;
  CHECK_THROWS_AS(run(env, trap_2d), InvalidArgument);

  RunSpec outside = spec(AlgorithmKind::kGreedy, 5, vec({3, 0}));
  CHECK_THROWS(run(env, outside));
}

TEST_CASE("single round trace") {
  const auto f = qt();
  const RunTrace t = run(Environment::col(f), spec(AlgorithmKind::kGreedy, 1, vec({1, 0})));
  REQUIRE(t.size() == 1);
  CHECK(t.rows[0].dynamic_regret_cum == doctest::Approx(0.25));
  CHECK(t.rows[0].static_regret_cum == doctest::Approx(0.25));
}

TEST_CASE("property: runs are deterministic in the seed") {
  const auto f = qt();
  RunSpec s = spec(AlgorithmKind::kMirrorDescent, 200, vec({1, 0}));
  s.schedule = StepSchedule::inverse_sqrt(1.0);
  s.feedback.mode = FeedbackSpec::Mode::kStochastic;
  s.feedback.sigma = 0.5;
  s.seed = 42;
  const RunTrace a = run(Environment::col(f), s);
  const RunTrace b = run(Environment::col(f), s);
  s.seed = 43;
  const RunTrace c = run(Environment::col(f), s);
  bool same = true, differs = false;
  for (long n = 0; n < 200; ++n) {
    same = same && (a.rows[n].x == b.rows[n].x);
    differs = differs || (a.rows[n].x != c.rows[n].x);
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("property: iterates stay in the set") {
  Rng rng(5);
  auto f = std::make_shared<Bifunction>(make_rotation(1.0, 0.9, 1.0));
  for (int t = 0; t < 20; ++t) {
    for (auto k : {AlgorithmKind::kGreedy, AlgorithmKind::kMann, AlgorithmKind::kMirrorDescent,
                   AlgorithmKind::kMidpoint}) {
      RunSpec s = spec(k, 30, sample_uniform(f->set, rng));
      s.schedule = StepSchedule::constant(0.4);
      for (const auto& r : run(Environment::col(f), s).rows) CHECK(contains(f->set, r.x));
    }
  }
}
