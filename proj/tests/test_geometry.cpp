#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oco/geometry.hpp"
#include "oco/rng.hpp"
#include "oco/vec.hpp"

using namespace oco;

namespace {

ConvexDomain unit_box2() { return ConvexDomain::box({0.0, 0.0}, {1.0, 1.0}); }
ConvexDomain unit_ball2() { return ConvexDomain::ball({0.0, 0.0}, 1.0); }

}  // namespace

TEST_CASE("factory computes center, inradius, diameter, hull") {
  SUBCASE("box") {
    auto k = unit_box2();
    CHECK(k.ambient_dim() == 2);
    CHECK(k.hull_dim() == 2);
    CHECK(k.interior_center() == Vec{0.5, 0.5});
    CHECK(k.interior_radius() == doctest::Approx(0.5));
    CHECK(k.diameter() == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("ball") {
    auto k = unit_ball2();
    CHECK(k.hull_dim() == 2);
    CHECK(k.interior_center() == Vec{0.0, 0.0});
    CHECK(k.interior_radius() == doctest::Approx(1.0));
    CHECK(k.diameter() == doctest::Approx(2.0));
  }
  SUBCASE("simplex") {
    auto k = ConvexDomain::simplex(3);
    CHECK(k.ambient_dim() == 3);
    CHECK(k.hull_dim() == 2);  // affine hull is a plane in R^3
    for (double c : k.interior_center()) CHECK(c == doctest::Approx(1.0 / 3));
    CHECK(k.diameter() == doctest::Approx(std::sqrt(2.0)));
    CHECK(k.interior_radius() > 0.0);
  }
  SUBCASE("malformed specs are rejected") {
    CHECK_THROWS(ConvexDomain::box({0.0, 1.0}, {1.0, 0.5}));  // lo >= hi
    CHECK_THROWS(ConvexDomain::ball({0.0}, 0.0));
    CHECK_THROWS(ConvexDomain::ball({0.0}, -1.0));
    CHECK_THROWS(ConvexDomain::simplex(1));
  }
}

TEST_CASE("hull basis is orthonormal and spans L0") {
  for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3),
                 ConvexDomain::simplex(4)}) {
    const auto& basis = k.hull_basis();
    CHECK(static_cast<int>(basis.size()) == k.hull_dim());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double want = i == j ? 1.0 : 0.0;
        CHECK(dot(basis[i], basis[j]) == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
  // simplex directions sum to zero: L0 = {v : sum v_i = 0}
  const auto simplex = ConvexDomain::simplex(3);
  for (const auto& b : simplex.hull_basis()) {
    CHECK(std::abs(b[0] + b[1] + b[2]) < 1e-12);
  }
}

TEST_CASE("projection closed forms") {
  SUBCASE("box clamp") {
    CHECK(unit_box2().project({1.5, 0.5}) == Vec{1.0, 0.5});
  }
  SUBCASE("ball radial scaling") {
    auto p = unit_ball2().project({3.0, 4.0});
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == doctest::Approx(0.8));
  }
  SUBCASE("simplex sort-and-threshold") {
    auto p = ConvexDomain::simplex(3).project({2.0, 0.0, 0.0});
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
    CHECK(p[2] == doctest::Approx(0.0));
    auto q = ConvexDomain::simplex(3).project({0.5, 0.5, 0.5});
    for (double c : q) CHECK(c == doctest::Approx(1.0 / 3));
  }
  SUBCASE("interior points are fixed") {
    CHECK(unit_box2().project({0.25, 0.75}) == Vec{0.25, 0.75});
  }
}

TEST_CASE("projection is idempotent and variationally optimal") {
  Rng rng(71);
  for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3)}) {
    for (int i = 0; i < 1000; ++i) {
      Vec x(k.ambient_dim());
      for (auto& c : x) c = rng.uniform(-2.0, 2.0);
      const Vec p = k.project(x);
      CHECK(k.contains(p));
      CHECK(k.project(p) == p);  // exact
      const Vec y = k.sample_point(rng);
      // <x - p, y - p> <= tol for every feasible y
      CHECK(dot(sub(x, p), sub(y, p)) <= 1e-9);
    }
  }
}

TEST_CASE("membership tolerance semantics") {
  auto k = unit_box2();
  CHECK(k.contains({0.5, 0.5}, 0.0));
  CHECK_FALSE(k.contains({1.1, 0.5}, 1e-9));
  CHECK(k.contains({1.0 + 1e-12, 0.5}, 1e-9));
}

TEST_CASE("inradius ball fits inside the domain") {
  Rng rng(72);
  for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3)}) {
    const Vec& c = k.interior_center();
    const double r = k.interior_radius();
    for (int i = 0; i < 1000; ++i) {
      Vec x = c;
      axpy(r, k.sample_unit_sphere(rng), x);
      CHECK(k.contains(x));
    }
  }
}

TEST_CASE("diameter dominates sampled pairwise distances") {
  Rng rng(73);
  for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3)}) {
    for (int i = 0; i < 1000; ++i) {
      CHECK(distance(k.sample_point(rng), k.sample_point(rng)) <=
            k.diameter() + 1e-12);
    }
  }
}

TEST_CASE("shrink maps to the interpolated set") {
  SUBCASE("box") {
    auto s = unit_box2().shrink(0.25);
    CHECK(s.same_set(ConvexDomain::box({0.25, 0.25}, {0.75, 0.75})));
    CHECK(s.interior_radius() == doctest::Approx(0.25));
  }
  SUBCASE("ball") {
    auto s = unit_ball2().shrink(0.5);
    CHECK(s.same_set(ConvexDomain::ball({0.0, 0.0}, 0.5)));
  }
  SUBCASE("alpha zero is the identity") {
    CHECK(unit_box2().shrink(0.0).same_set(unit_box2()));
    CHECK(ConvexDomain::simplex(3).shrink(0.0).same_set(
        ConvexDomain::simplex(3)));
  }
  SUBCASE("alpha at or above the inradius is rejected") {
    CHECK_THROWS_WITH_AS(unit_box2().shrink(0.5),
                         doctest::Contains("interior_radius"),
                         std::invalid_argument);
    CHECK_THROWS(unit_box2().shrink(0.7));
    CHECK_THROWS(unit_box2().shrink(-0.1));
  }
}

TEST_CASE("shrink nests and maps members inward") {
  Rng rng(74);
  for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3)}) {
    const double r = k.interior_radius();
    auto inner = k.shrink(0.4 * r);
    auto outer = k.shrink(0.2 * r);
    const Vec& c = k.interior_center();
    const double frac = 0.4 * r / r;
    for (int i = 0; i < 500; ++i) {
      const Vec x2 = inner.sample_point(rng);
      CHECK(outer.contains(x2, 1e-9));  // K_a2 inside K_a1 for a1 < a2
      CHECK(k.contains(x2, 1e-9));
      // (1 - a/r) x + (a/r) c lands in the shrunk set, for x in K
      Vec mapped = scaled(k.sample_point(rng), 1.0 - frac);
      axpy(frac, c, mapped);
      CHECK(inner.contains(mapped, 1e-9));
    }
  }
}

TEST_CASE("probes from the shrunk set stay feasible") {
  // delta <= alpha keeps x + delta v inside K; the smoothing wrappers rely
  // on exactly this.
  Rng rng(75);
  for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3)}) {
    const double alpha = 0.3 * k.interior_radius();
    const double delta = alpha;
    auto shrunk = k.shrink(alpha);
    for (int i = 0; i < 10000; ++i) {
      Vec x = shrunk.sample_point(rng);
      axpy(delta, k.sample_unit_sphere(rng), x);
      CHECK(k.contains(x, 1e-9));
    }
  }
}

TEST_CASE("sphere sampler: unit norm, hull membership, isotropy") {
  Rng rng(76);
  auto simplex = ConvexDomain::simplex(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec v = simplex.sample_unit_sphere(rng);
    CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(v[0] + v[1] + v[2]) < 1e-12);
  }

  auto ball = unit_ball2();
  const int n = 100000;
  Vec mean(2, 0.0);
  double cov[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int i = 0; i < n; ++i) {
    const Vec v = ball.sample_unit_sphere(rng);
    axpy(1.0, v, mean);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) cov[a][b] += v[a] * v[b];
  }
  CHECK(norm2(scaled(mean, 1.0 / n)) <= 0.02);
  // E[v v^T] = I_k / k on the unit sphere
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double want = a == b ? 0.5 : 0.0;
      CHECK(std::abs(cov[a][b] / n - want) <= 0.01);
    }
  }
}

TEST_CASE("ball sampler: radius law and degenerate hull") {
  Rng rng(77);
  auto ball = unit_ball2();
  double sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec v = ball.sample_unit_ball(rng);
    const double nv = norm2(v);
    CHECK(nv <= 1.0 + 1e-12);
    sum_sq += nv * nv;
  }
  CHECK(std::abs(sum_sq / n - 0.5) <= 0.01);  // E||v||^2 = k/(k+2), k=2

  auto seg = ConvexDomain::box({0.0}, {1.0});
  REQUIRE(seg.hull_dim() == 1);
  for (int i = 0; i < 100; ++i) {
    const Vec v = seg.sample_unit_ball(rng);
    CHECK(std::abs(v[0]) <= 1.0 + 1e-12);
  }
}

TEST_CASE("support maximizers per shape") {
  SUBCASE("box picks the matching corner") {
    auto k = unit_box2();
    CHECK(k.support_point({1.0, -1.0}) == Vec{1.0, 0.0});
    CHECK(k.support({1.0, -1.0}) == doctest::Approx(1.0));
  }
  SUBCASE("ball scales the direction") {
    auto p = unit_ball2().support_point({3.0, 4.0});
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == doctest::Approx(0.8));
  }
  SUBCASE("simplex picks the best vertex") {
    auto p = ConvexDomain::simplex(3).support_point({0.2, 0.7, 0.1});
    CHECK(p == Vec{0.0, 1.0, 0.0});
  }
  SUBCASE("support point attains the support value") {
    Rng rng(78);
    for (auto k : {unit_box2(), unit_ball2(), ConvexDomain::simplex(3)}) {
      for (int i = 0; i < 200; ++i) {
        Vec a(k.ambient_dim());
        for (auto& c : a) c = rng.normal();
        const Vec p = k.support_point(a);
        CHECK(k.contains(p, 1e-9));
        CHECK(dot(a, p) == doctest::Approx(k.support(a)).epsilon(1e-9));
        CHECK(dot(a, k.sample_point(rng)) <= k.support(a) + 1e-9);
      }
    }
  }
}
