#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oco/agents.hpp"
#include "oco/arena.hpp"
#include "oco/geometry.hpp"
#include "oco/losses.hpp"
#include "oco/meta.hpp"
#include "oco/vec.hpp"

using namespace oco;

namespace {

// First-order probe agent: plays the domain center and asks for feedback at
// a configurable offset from it, recording everything it is fed. Lets the
// wrapper tests pin the exact vectors a base learner would see.
class RecordingAgent final : public Agent {
 public:
  RecordingAgent(Vec query_offset, bool trivial)
      : offset_(std::move(query_offset)), trivial_(trivial) {}

  int oracle_order() const override { return 1; }
  bool trivial_query() const override { return trivial_; }
  bool is_deterministic() const override { return true; }

  void bind(const ConvexDomain& k, std::uint64_t) override {
    domain_ = k;
    received.clear();
    queried_ = false;
  }
  const ConvexDomain& domain() const override { return *domain_; }

  Vec act() override {
    queried_ = false;
    return domain_->interior_center();
  }
  bool has_query() const override { return !queried_; }
  Vec next_query() override {
    queried_ = true;
    if (trivial_) return domain_->interior_center();
    Vec y = domain_->interior_center();
    axpy(1.0, offset_, y);
    return domain_->project(y);
  }
  void observe(const Observation& obs) override {
    received.push_back(obs_vector(obs));
  }

  std::vector<Vec> received;

 private:
  Vec offset_;
  bool trivial_;
  std::optional<ConvexDomain> domain_;
  bool queried_ = false;
};

const ConvexDomain kBox = ConvexDomain::box({-2.0, -2.0}, {2.0, 2.0});

}  // namespace

TEST_CASE("fts answers base queries from the quadratic surrogate") {
  // base queries at center + (1,1) = (1,1); action is the center (0,0)
  auto base = std::make_unique<RecordingAgent>(Vec{1.0, 1.0}, false);
  auto* probe = base.get();
  auto a = make_fts(std::move(base), 1.0);
  a->bind(kBox, 1);

  CHECK(a->oracle_order() == 1);
  CHECK(a->trivial_query());  // semi-bandit out

  const Vec x = a->act();
  CHECK(x == Vec{0.0, 0.0});
  REQUIRE(a->has_query());
  CHECK(a->next_query() == x);  // one real query, at the action
  a->observe(Observation{Vec{1.0, 0.0}});
  CHECK_FALSE(a->has_query());

  REQUIRE(probe->received.size() == 1);
  // o + mu (y - x) = (1,0) + 1*((1,1) - (0,0))
  CHECK(probe->received[0][0] == doctest::Approx(2.0));
  CHECK(probe->received[0][1] == doctest::Approx(1.0));
}

TEST_CASE("fts with mu zero forwards the observed gradient unchanged") {
  auto base = std::make_unique<RecordingAgent>(Vec{1.0, 1.0}, false);
  auto* probe = base.get();
  auto a = make_fts(std::move(base), 0.0);
  a->bind(kBox, 1);
  for (int t = 0; t < 3; ++t) {
    a->act();
    a->next_query();
    a->observe(Observation{Vec{0.25, -0.5}});
  }
  for (const auto& g : probe->received) CHECK(g == Vec{0.25, -0.5});
}

TEST_CASE("restrict confines the base to the shrunk domain") {
  auto box01 = ConvexDomain::box({0.0, 0.0}, {1.0, 1.0});
  auto a = make_restrict(build_ogd(box01, StepSchedule::convex(1.0)), 0.25);
  a->bind(box01, 1);
  auto inner = box01.shrink(0.25);
  Rng grads(606);
  for (int t = 0; t < 200; ++t) {
    const Vec x = a->act();
    CHECK(inner.contains(x, 1e-9));  // actions live in [0.25, 0.75]^2
    a->next_query();
    a->observe(Observation{Vec{grads.normal(), grads.normal()}});
  }

  // alpha = 0 leaves the base's behavior unchanged
  auto bare = build_ogd(box01, StepSchedule::convex(1.0));
  auto wrapped = make_restrict(build_ogd(box01, StepSchedule::convex(1.0)), 0.0);
  wrapped->bind(box01, 1);
  Rng g2(607);
  for (int t = 0; t < 50; ++t) {
    const Vec gw = {g2.normal(), g2.normal()};
    CHECK(bare->act() == wrapped->act());
    bare->next_query();
    wrapped->next_query();
    bare->observe(Observation{gw});
    wrapped->observe(Observation{gw});
  }
}

TEST_CASE("fotzo probes once per base query and feeds the scaled estimate") {
  const double alpha = 0.5;
  const double delta = 0.2;
  auto base = std::make_unique<RecordingAgent>(Vec{0.3, -0.1}, false);
  auto* probe = base.get();
  auto a = make_fotzo(std::move(base), alpha, delta);
  a->bind(kBox, 9);

  CHECK(a->oracle_order() == 0);
  CHECK_FALSE(a->trivial_query());
  CHECK(probe->domain().same_set(kBox.shrink(alpha)));  // base is restricted

  for (int t = 0; t < 100; ++t) {
    const Vec x = a->act();
    CHECK(x == Vec{0.0, 0.0});  // base's action passes through
    REQUIRE(a->has_query());
    const Vec q = a->next_query();
    CHECK(kBox.contains(q, 1e-9));
    // the probe sits delta away from the base's query, along a unit v
    const Vec y = {0.3, -0.1};  // center + offset, interior to the shrunk box
    const Vec v = scaled(sub(q, y), 1.0 / delta);
    CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-9));
    const double obs = 0.3;
    const std::size_t before = probe->received.size();
    a->observe(Observation{obs});
    REQUIRE(probe->received.size() == before + 1);
    const Vec want = one_point_estimate(kBox.hull_dim(), delta, obs, v);
    CHECK(distance(probe->received.back(), want) < 1e-12);
    CHECK_FALSE(a->has_query());
  }
}

TEST_CASE("stb plays a dithered action and feeds the one-point estimate") {
  const double alpha = 0.2;
  const double delta = 0.2;
  auto base = std::make_unique<RecordingAgent>(Vec{}, true);
  auto* probe = base.get();
  auto a = make_stb(std::move(base), alpha, delta);
  auto box01 = ConvexDomain::box({0.0, 0.0}, {1.0, 1.0});
  a->bind(box01, 11);

  CHECK(a->oracle_order() == 0);
  CHECK(a->trivial_query());  // bandit: the query is the action

  for (int t = 0; t < 1000; ++t) {
    const Vec played = a->act();
    CHECK(box01.contains(played, 1e-9));
    const Vec x = probe->domain().interior_center();  // base action
    const Vec v = scaled(sub(played, x), 1.0 / delta);
    CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(a->has_query());
    CHECK(a->next_query() == played);
    const double obs = 0.3;
    a->observe(Observation{obs});
    const Vec want = one_point_estimate(box01.hull_dim(), delta, obs, v);
    CHECK(distance(probe->received.back(), want) < 1e-12);
  }
}

TEST_CASE("fotzo_2p probes both sides and feeds the difference quotient") {
  const double delta = 0.25;
  auto base = std::make_unique<RecordingAgent>(Vec{0.2, 0.1}, false);
  auto* probe = base.get();
  auto a = make_fotzo_2p(std::move(base), delta);
  a->bind(kBox, 13);

  CHECK(a->oracle_order() == 0);
  CHECK(a->needs_deterministic_oracle());
  CHECK(probe->domain().same_set(kBox.shrink(delta)));

  auto f = linear_loss({2.0, 0.0}, kBox);
  for (int t = 0; t < 200; ++t) {
    a->act();
    REQUIRE(a->has_query());
    const Vec q_plus = a->next_query();
    CHECK(kBox.contains(q_plus, 1e-9));
    a->observe(Observation{f.eval(q_plus)});
    REQUIRE(a->has_query());  // second probe of the same base query
    const Vec q_minus = a->next_query();
    CHECK(kBox.contains(q_minus, 1e-9));
    const Vec v = scaled(sub(q_plus, q_minus), 1.0 / (2.0 * delta));
    CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-9));
    const std::size_t before = probe->received.size();
    a->observe(Observation{f.eval(q_minus)});
    REQUIRE(probe->received.size() == before + 1);
    const Vec got = probe->received.back();
    const Vec want = two_point_estimate(kBox.hull_dim(), delta,
                                        f.eval(q_plus), f.eval(q_minus), v);
    CHECK(distance(got, want) < 1e-12);
    // linear loss: the estimate is k <a, v> v, bounded by k M1
    CHECK(norm2(got) <= kBox.hull_dim() * f.lipschitz_m1 + 1e-9);
  }
}

TEST_CASE("wiring rules are enforced at construction or bind") {
  auto ball = ConvexDomain::ball({0.0, 0.0}, 1.0);
  const auto ogd = [&] { return build_ogd(ball, StepSchedule::convex(1.0)); };
  const auto zeroth = [&] { return make_stb(ogd(), 0.2, 0.2); };

  SUBCASE("fts needs a first-order base") {
    CHECK_THROWS_AS(make_fts(zeroth(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_fts(ogd(), -1.0), std::invalid_argument);
    CHECK_NOTHROW(make_fts(ogd(), 0.0));
  }
  SUBCASE("fotzo needs a first-order base and delta <= alpha") {
    CHECK_THROWS_AS(make_fotzo(zeroth(), 0.2, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(make_fotzo(ogd(), 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(make_fotzo(ogd(), 0.2, 0.0), std::invalid_argument);
    CHECK_NOTHROW(make_fotzo(ogd(), 0.2, 0.2));
  }
  SUBCASE("stb needs a semi-bandit base") {
    auto full_info = build_ader(ball, 64, 1.0);
    CHECK_THROWS_AS(make_stb(std::move(full_info), 0.2, 0.2),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_stb(ogd(), 0.1, 0.2), std::invalid_argument);
  }
  SUBCASE("fotzo_2p needs a first-order base and a positive probe") {
    CHECK_THROWS_AS(make_fotzo_2p(zeroth(), 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_fotzo_2p(ogd(), 0.0), std::invalid_argument);
  }
  SUBCASE("shrink amounts are checked against the inradius at bind") {
    auto a = make_fotzo(ogd(), 1.5, 0.1);  // alpha > r = 1
    CHECK_THROWS_AS(a->bind(ball, 1), std::invalid_argument);
    auto b = make_restrict(ogd(), 2.0);
    CHECK_THROWS_AS(b->bind(ball, 1), std::invalid_argument);
    auto c = make_fotzo_2p(ogd(), 1.0);  // delta = r
    CHECK_THROWS_AS(c->bind(ball, 1), std::invalid_argument);
  }
}

TEST_CASE("fts is the identity on an already-quadratized opponent") {
  // Running fts(ogd) against the round-by-round quadratization of a convex
  // opponent reproduces bare ogd against the same quadratization, and bare
  // ogd against the original opponent (the surrogate gradient at the action
  // is the real gradient).
  auto ball = ConvexDomain::ball({0.0, 0.0}, 1.0);
  const int horizon = 64;
  AdversarySpec spec;
  spec.type = "quadratic-drift";
  spec.mu = 1.0;
  spec.path_length = 1.0;

  const auto actions_of = [&](std::unique_ptr<Agent> agent, bool linearized) {
    auto adv = build_adversary(spec, ball, 77, horizon);
    if (linearized) adv = linearize_adversary(std::move(adv), 1.0, ball);
    return run_game(*agent, *adv, ball, horizon, 5, 6).actions();
  };
  const auto schedule = StepSchedule::strongly_convex(1.0);
  const auto bare = actions_of(build_ogd(ball, schedule), false);
  const auto bare_lin = actions_of(build_ogd(ball, schedule), true);
  const auto wrapped =
      actions_of(make_fts(build_ogd(ball, schedule), 1.0), true);
  CHECK(bare == bare_lin);
  CHECK(bare == wrapped);
}

TEST_CASE("wrapped runs replay bitwise under a fixed seed") {
  auto box01 = ConvexDomain::box({0.0, 0.0}, {1.0, 1.0});
  AdversarySpec spec;
  spec.type = "fixed-repeat";
  spec.oracle_order = 0;
  spec.inner = std::make_shared<AdversarySpec>();
  spec.inner->type = "linear-random";
  spec.inner->m1 = 1.0;

  const auto run_once = [&] {
    auto adv = build_adversary(spec, box01, 21, 128);
    auto agent = make_stb(build_ogd(box01, StepSchedule::convex(1.0)), 0.2, 0.2);
    return run_game(*agent, *adv, box01, 128, 31, 32).actions();
  };
  CHECK(run_once() == run_once());
}
