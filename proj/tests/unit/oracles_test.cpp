#include <cmath>

#include "col/errors.hpp"
#include "col/oracles.hpp"
#include "col/problems.hpp"
#include "util.hpp"

using namespace col;
using testutil::check_close;
using testutil::vec;

namespace {

Bifunction qt(double lambda = 0.5, Vector c = Vector::Zero(2)) {
  return make_quadratic_tracking(2.0, lambda, c, DecisionSet::cube(2, -1, 1));
}

Bifunction without_shortcuts(Bifunction f) {
  f.best_response = nullptr;
  f.known_equilibrium.reset();
  f.cumulative = nullptr;
  return f;
}

Matrix symmetric_game() {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  return A;
}

// max over a fine grid of Phi(x, x_hat); the oracle for the closed-form dual residual.
double grid_dual_residual(const Bifunction& f, const Vector& x_hat, Index k) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : grid(f.set, k)) best = std::max(best, f.eval(x, x_hat));
  return best;
}

}  // namespace

TEST_CASE("best response from the closed form and from projected gradient descent agree") {
  Rng rng(1);
  const Bifunction f = qt(0.5, vec({0.7, -0.2}));
  const Bifunction g = without_shortcuts(f);
  for (int t = 0; t < 50; ++t) {
    const Vector x = sample_uniform(f.set, rng);
    const Vector tilt = sample_uniform(f.set, rng);
    check_close(best_response(g, x, tilt), best_response(f, x, tilt), 1e-6);
  }
}

TEST_CASE("gap examples") {
  // (alpha/2)(1 - lambda)^2 |x|^2.
  const double want = 1.0 * 0.25 * 1.0;
  CHECK(gap(qt(), vec({1, 0})) == doctest::Approx(want));
  CHECK(std::abs(gap(qt(), vec({0.3, 0.1}) * 0.0)) <= 1e-15);
  const auto box = DecisionSet::cube(1, -1, 1);
  const Bifunction h = make_convex_opt(squared_distance(Vector::Zero(1), box), box);
  CHECK(gap(h, vec({0.5})) == doctest::Approx(0.25));
}

TEST_CASE("property: gap vanishes at best responses of the offline problem and is nonnegative") {
  Rng rng(2);
  const Bifunction f = qt(0.0, vec({0.3, 0.4}));
  CHECK(std::abs(gap(f, vec({0.3, 0.4}))) <= 1e-15);
  const Bifunction g = qt();
  for (int t = 0; t < 200; ++t) CHECK(gap(g, sample_uniform(g.set, rng)) >= -1e-15);
}

TEST_CASE("fixed-point equilibrium of quadratic tracking") {
  const Bifunction f = without_shortcuts(qt());
  const double tol = 1e-10;
  const auto cert = find_equilibrium(f, tol);
  CHECK(cert.method == EquilibriumCertificate::Method::kFixedPointIteration);
  CHECK(cert.certified);
  CHECK(cert.x_star.norm() <= 1e-5);
  CHECK(cert.gap_value <= tol);
  // Contraction 0.5 from any start in a set of diameter D.
  const double D = diameter(f.set);
  CHECK(cert.iterations <= static_cast<long>(std::ceil(std::log(D / tol) / std::log(2.0))) + 1);
}

TEST_CASE("offline equilibrium is reached in one iteration") {
  const Bifunction f = without_shortcuts(qt(0.0, vec({1.5, 0.3})));
  const auto cert = find_equilibrium(f);
  check_close(cert.x_star, vec({1.0, 0.3}), 1e-12);
  CHECK(cert.iterations <= 2);
}

TEST_CASE("symmetric matrix game has the uniform equilibrium") {
  const Bifunction f = make_matrix_game(symmetric_game());
  const auto cert = find_equilibrium(f);
  check_close(cert.x_star, vec({0.5, 0.5, 0.5, 0.5}), 1e-4);
  CHECK(cert.gap_value <= 1e-6);
  // Independent check: no grid point has lower max-payoff than uniform.
  CHECK(grid_dual_residual(f, cert.x_star, 41) <= 1e-6);
}

TEST_CASE("dual residual closed forms against a grid") {
  const auto box = DecisionSet::cube(1, -1, 1);
  const Bifunction h = make_convex_opt(squared_distance(Vector::Zero(1), box), box);
  CHECK(dual_residual(h, vec({0.5})) == doctest::Approx(0.25));

  const Bifunction g = make_matrix_game(symmetric_game());
  CHECK(std::abs(dual_residual(g, vec({0.5, 0.5, 0.5, 0.5}))) <= 1e-15);
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const Vector xh = sample_uniform(g.set, rng);
    const double exact = dual_residual(g, xh);
    const double approx = grid_dual_residual(g, xh, 41);
    // The grid can only underestimate a maximum.
    CHECK(approx <= exact + 1e-12);
    CHECK(exact - approx <= 0.1);
  }
}

TEST_CASE("dual VI residual") {
  const Bifunction f = qt();
  // <alpha (1 - lambda) x, x_hat - x> at x_hat = 0 is -|x|^2 <= 0.
  CHECK(dvi_residual(f, vec({0, 0})) <= 1e-15);
  CHECK(dvi_residual(f, vec({0.9, 0.9})) > 0.1);
}

TEST_CASE("property: dvi <= dual <= gap on monotone problems") {
  Rng rng(4);
  for (const Bifunction& f : {make_matrix_game(symmetric_game()),
                              make_linear_vi((Matrix(2, 2) << 1, 2, -2, 1).finished(), vec({0.3, -0.1}),
                                             DecisionSet::cube(2, -1, 1))}) {
    for (int t = 0; t < 40; ++t) {
      const Vector xh = sample_uniform(f.set, rng);
      const double g = gap(f, xh);
      const double d = dual_residual(f, xh);
      const double v = dvi_residual(f, xh);
      CHECK(v <= d + 1e-3);
      CHECK(d <= g + 1e-3);
    }
  }
}

TEST_CASE("no certified route in high dimension without contraction") {
  const Bifunction f = without_shortcuts(make_quadratic_tracking(1.0, 1.5, Vector::Zero(5),
                                                                 DecisionSet::cube(5, -1, 1)));
  CHECK_THROWS_AS(find_equilibrium(f), NoCertifiedRoute);
}

TEST_CASE("grid fallback for a low-dimensional expansive problem") {
  const Bifunction f = without_shortcuts(make_reflected_expansion());
  const auto cert = find_equilibrium(f);
  CHECK(cert.method == EquilibriumCertificate::Method::kGapMinimization);
  CHECK_FALSE(cert.certified);
  CHECK(std::abs(cert.x_star[0] - 0.2) <= 1e-4);
}

TEST_CASE("compass search finds a box-constrained minimum") {
  const auto box = DecisionSet::cube(2, -1, 1);
  const Vector x = compass_search(
      box, [](const Vector& v) { return std::pow(v[0] - 2.0, 2) + std::pow(v[1] - 0.3, 2); },
      Vector::Zero(2), 0.5, 1e-10, 100000);
  check_close(x, vec({1.0, 0.3}), 1e-8);
}
