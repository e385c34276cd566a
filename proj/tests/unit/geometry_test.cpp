#include <cmath>
#include <limits>
#include <random>

#include "col/bregman.hpp"
#include "col/errors.hpp"
#include "col/geometry.hpp"
#include "util.hpp"

using namespace col;
using testutil::check_close;
using testutil::vec;

namespace {

// Closest point of a fine lattice on Simplex(d); the oracle for the sort-based projection.
Vector brute_simplex_projection(const Vector& p, int k) {
  double best = std::numeric_limits<double>::infinity();
  Vector arg;
  const Index d = p.size();
  std::vector<int> c(d, 0);
  std::function<void(Index, int)> rec = [&](Index i, int left) {
    if (i == d - 1) {
      c[i] = left;
      Vector x(d);
      for (Index j = 0; j < d; ++j) x[j] = static_cast<double>(c[j]) / k;
      const double v = (x - p).squaredNorm();
      if (v < best) {
        best = v;
        arg = x;
      }
      return;
    }
    for (int t = 0; t <= left; ++t) {
      c[i] = t;
      rec(i + 1, left - t);
    }
  };
  rec(0, k);
  return arg;
}

}  // namespace

TEST_CASE("projection onto a box clips componentwise") {
  check_close(project(DecisionSet::cube(2, -1, 1), vec({2, 0.5})), vec({1, 0.5}), 0.0);
}

TEST_CASE("projection onto a ball scales radially") {
  check_close(project(DecisionSet::ball(Vector::Zero(2), 1.0), vec({3, 4})), vec({0.6, 0.8}), 1e-15);
}

TEST_CASE("simplex projection matches a lattice search") {
  check_close(project(DecisionSet::simplex(2), vec({0.3, 0.3})), vec({0.5, 0.5}), 1e-15);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 20; ++t) {
    const Vector p = vec({n01(rng), n01(rng), n01(rng)});
    const Vector got = project(DecisionSet::simplex(3), p);
    const Vector oracle = brute_simplex_projection(p, 400);
    CAPTURE(t);
    // Lattice spacing 1/400 bounds the oracle's own error.
    CHECK((got - oracle).norm() <= 2.0 / 400.0);
    CHECK((got - p).squaredNorm() <= (oracle - p).squaredNorm() + 1e-12);
  }
}

TEST_CASE("diameters") {
  CHECK(diameter(DecisionSet::cube(2, -1, 1)) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(diameter(DecisionSet::ball(Vector::Zero(2), 1.0)) == doctest::Approx(2.0));
  // Largest distance between vertices of Simplex(2).
  double vmax = 0.0;
  const Vector e0 = vec({1, 0}), e1 = vec({0, 1});
  vmax = std::max(vmax, (e0 - e1).norm());
  CHECK(diameter(DecisionSet::simplex(2)) == doctest::Approx(vmax));
}

TEST_CASE("simplex of dimension one is rejected") {
  CHECK_THROWS_AS(DecisionSet::simplex(1), InvalidArgument);
}

TEST_CASE("bregman divergences") {
  const auto E = BregmanGeometry::euclidean();
  const auto H = BregmanGeometry::entropy();
  CHECK(bregman(E, vec({1, 0}), vec({0, 0})) == doctest::Approx(0.5));
  CHECK(bregman(E, vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
  const double kl = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
  CHECK(std::abs(bregman(H, vec({0.5, 0.5}), vec({0.25, 0.75})) - kl) <= 1e-15);
  CHECK(std::abs(kl - 0.14384) <= 1e-5);
  CHECK_THROWS_AS(bregman(H, vec({0.5, 0.5}), vec({1.0, 0.0})), InvalidArgument);
}

TEST_CASE("mirror steps") {
  const auto E = BregmanGeometry::euclidean();
  const auto box = DecisionSet::cube(1, -1, 1);
  check_close(mirror_step(E, box, vec({1}), vec({1}), 0.2), vec({0.8}), 1e-15);
  check_close(mirror_step(E, box, vec({1}), vec({-1}), 0.5), vec({1}), 0.0);

  // Multiplicative weights w_i = x_i exp(-eta g_i), normalized.
  const Vector x = vec({0.5, 0.5}), g = vec({std::log(2.0), 0.0});
  Vector w(2);
  for (Index i = 0; i < 2; ++i) w[i] = x[i] * std::exp(-g[i]);
  w /= w.sum();
  const Vector got = mirror_step(BregmanGeometry::entropy(), DecisionSet::simplex(2), x, g, 1.0);
  check_close(got, w, 1e-15);
  check_close(got, vec({1.0 / 3.0, 2.0 / 3.0}), 1e-15);
}

TEST_CASE("entropy geometry needs a simplicial set") {
  CHECK_THROWS(mirror_step(BregmanGeometry::entropy(), DecisionSet::cube(2, 0, 1), vec({0.5, 0.5}),
                           vec({1, 0}), 0.1));
}

TEST_CASE("entropy step on a product of simplexes acts per factor") {
  const auto set = DecisionSet::product({DecisionSet::simplex(2), DecisionSet::simplex(3)});
  const Vector x = vec({0.5, 0.5, 0.2, 0.3, 0.5});
  const Vector g = vec({1, 0, 0, 1, 2});
  const double eta = 0.7;
  const Vector got = mirror_step(BregmanGeometry::entropy(), set, x, g, eta);
  Vector w(5);
  for (Index i = 0; i < 5; ++i) w[i] = x[i] * std::exp(-eta * g[i]);
  w.head(2) /= w.head(2).sum();
  w.tail(3) /= w.tail(3).sum();
  check_close(got, w, 1e-15);
}

TEST_CASE("property: projections are idempotent, nonexpansive and satisfy the obtuse-angle condition") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> n01;
  const std::vector<DecisionSet> sets = {
      DecisionSet::cube(3, -1, 2), DecisionSet::ball(vec({0.5, -0.5, 0}), 1.5), DecisionSet::simplex(4),
      DecisionSet::product({DecisionSet::ball(Vector::Zero(2), 1.0), DecisionSet::simplex(2)})};
  for (const auto& s : sets) {
    for (int t = 0; t < 500; ++t) {
      Vector p(s.dim()), q(s.dim());
      for (Index i = 0; i < s.dim(); ++i) {
        p[i] = 3 * n01(rng);
        q[i] = 3 * n01(rng);
      }
      const Vector pp = project(s, p), pq = project(s, q);
      CHECK(contains(s, pp));
      CHECK((project(s, pp) - pp).norm() <= 1e-12);
      CHECK((pp - pq).norm() <= (p - q).norm() + 1e-12);
      const Vector y = sample_uniform(s, rng);
      CHECK((p - pp).dot(y - pp) <= 1e-10);
    }
  }
}

TEST_CASE("property: grids and samples stay inside the set") {
  std::mt19937_64 rng(7);
  for (const auto& s : {DecisionSet::cube(2, -1, 1), DecisionSet::ball(Vector::Zero(2), 2.0),
                        DecisionSet::simplex(3)}) {
    for (const auto& p : grid(s, 9)) CHECK(contains(s, p));
    for (int t = 0; t < 200; ++t) CHECK(contains(s, sample_uniform(s, rng)));
  }
  CHECK(grid(DecisionSet::simplex(3), 5).size() == 15u);  // compositions of 4 into 3 parts
}

TEST_CASE("property: entropy divergence is nonnegative and 1-strongly convex in l1") {
  std::mt19937_64 rng(55);
  const auto s = DecisionSet::simplex(5);
  for (int t = 0; t < 2000; ++t) {
    const Vector a = sample_uniform(s, rng), b = sample_uniform(s, rng);
    const double d = bregman(BregmanGeometry::entropy(), a, b);
    CHECK(d >= 0.5 * std::pow((a - b).lpNorm<1>(), 2) - 1e-12);
  }
}

TEST_CASE("geometry is generic in the scalar type") {
  using SetF = BasicDecisionSet<long double>;
  VectorX<long double> p(2);
  p << 3.0L, 4.0L;
  const auto out = project(SetF::ball(VectorX<long double>::Zero(2), 1.0L), p);
  CHECK(std::abs(static_cast<double>(out[0] - 0.6L)) <= 1e-18);
}
