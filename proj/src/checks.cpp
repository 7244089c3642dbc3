#include "oco/checks.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "oco/agents.hpp"
#include "oco/arena.hpp"
#include "oco/losses.hpp"
#include "oco/meta.hpp"

namespace oco {

namespace {

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::vector<ConvexDomain> test_domains() {
  std::vector<ConvexDomain> ks;
  ks.push_back(ConvexDomain::box({0.0, 0.0}, {1.0, 1.0}));
  ks.push_back(ConvexDomain::ball({0.25, -0.5, 0.0}, 1.5));
  ks.push_back(ConvexDomain::simplex(3));
  return ks;
}

Vec ambient_probe(const ConvexDomain& k, Rng& rng) {
  // A point that may or may not be feasible: domain point plus noise.
  Vec p = k.sample_point(rng);
  for (double& c : p) c += rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace

CheckResult check_projection(std::uint64_t seed, int trials) {
  CheckResult out{"projection", true, ""};
  Rng rng(seed);
  for (const auto& k : test_domains()) {
    for (int i = 0; i < trials; ++i) {
      Vec x = ambient_probe(k, rng);
      Vec p = k.project(x);
      if (!k.contains(p, 1e-7)) {
        out.pass = false;
        out.detail = "projected point is not feasible";
        return out;
      }
      Vec pp = k.project(p);
      if (distance(p, pp) > 1e-9) {
        out.pass = false;
        out.detail = "projection is not idempotent";
        return out;
      }
      Vec y = k.sample_point(rng);
      // Variational inequality <x - p, y - p> <= 0 for every feasible y.
      if (dot(sub(x, p), sub(y, p)) > 1e-9) {
        out.pass = false;
        out.detail = "projection violates the optimality inequality";
        return out;
      }
    }
  }
  out.detail = fmt("%d trials per domain", trials);
  return out;
}

CheckResult check_membership(std::uint64_t seed, double alpha, double delta,
                             int trials) {
  CheckResult out{"membership", true, ""};
  Rng rng(seed);
  for (const auto& k : test_domains()) {
    const double r = k.interior_radius();
    const double a = std::min(alpha, 0.8 * r);
    const double d = std::min(delta, a * (delta / alpha));
    ConvexDomain inner = k.shrink(a);
    ConvexDomain mid = k.shrink(0.5 * a);
    for (int i = 0; i < trials; ++i) {
      Vec x = inner.sample_point(rng);
      if (!mid.contains(x, 1e-7) || !k.contains(x, 1e-7)) {
        out.pass = false;
        out.detail = "shrunk domains are not nested";
        return out;
      }
      Vec probe = x;
      axpy(d, k.sample_unit_sphere(rng), probe);
      if (!k.contains(probe, 1e-7)) {
        out.pass = false;
        out.detail = fmt(
            "probe at distance %.3g from the %.3g-shrunk set left the "
            "domain",
            d, a);
        return out;
      }
    }
  }
  out.detail = fmt("%d trials per domain", trials);
  return out;
}

CheckResult check_sampler(std::uint64_t seed, int samples) {
  CheckResult out{"sampler", true, ""};
  Rng rng(seed);
  for (const auto& k : test_domains()) {
    const int d = k.ambient_dim();
    const int kk = k.hull_dim();
    std::vector<double> mean(d, 0.0);
    std::vector<double> cov(d * d, 0.0);
    double ball_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
      Vec v = k.sample_unit_sphere(rng);
      if (std::abs(norm2(v) - 1.0) > 1e-9) {
        out.pass = false;
        out.detail = "sphere sample is not unit norm";
        return out;
      }
      for (int a = 0; a < d; ++a) {
        mean[a] += v[a];
        for (int b = 0; b < d; ++b) cov[a * d + b] += v[a] * v[b];
      }
      Vec w = k.sample_unit_ball(rng);
      ball_sq += dot(w, w);
    }
    // Covariance of the ambient embedding: P / k with P the projector onto
    // L0. For full-dimensional hulls P is the identity.
    double max_err = 0.0;
    for (int a = 0; a < d; ++a) {
      if (std::abs(mean[a] / samples) > 0.02) {
        out.pass = false;
        out.detail = "sphere sample mean is biased";
        return out;
      }
      for (int b = 0; b < d; ++b) {
        double proj = 0.0;
        for (const Vec& e : k.hull_basis()) proj += e[a] * e[b];
        const double want = proj / double(kk);
        max_err = std::max(max_err,
                           std::abs(cov[a * d + b] / samples - want));
      }
    }
    if (max_err > 0.01) {
      out.pass = false;
      out.detail = fmt("sphere covariance error %.4f > 0.01", max_err);
      return out;
    }
    const double want_sq = double(kk) / double(kk + 2);
    if (std::abs(ball_sq / samples - want_sq) > 0.01) {
      out.pass = false;
      out.detail = "ball sample second moment is off";
      return out;
    }
  }
  out.detail = fmt("%d samples per domain", samples);
  return out;
}

CheckResult check_estimator_mean(std::uint64_t seed, int samples) {
  CheckResult out{"estimator_mean", true, ""};
  Rng rng(seed);
  ConvexDomain k = ConvexDomain::ball({0.0, 0.0}, 1.0);
  const double delta = 0.1;
  ConvexDomain inner = k.shrink(2.0 * delta);
  LossFunction f = quadratic_loss({0.3, -0.2}, 1.0, k);

  for (int pt = 0; pt < 5; ++pt) {
    Vec x = inner.sample_point(rng);
    // Monte Carlo mean of the one-point estimator at x.
    Vec est_mean(2, 0.0);
    std::vector<double> est_m2(2, 0.0);
    for (int i = 0; i < samples; ++i) {
      Vec v = k.sample_unit_sphere(rng);
      Vec probe = x;
      axpy(delta, v, probe);
      Vec e = one_point_estimate(k.hull_dim(), delta, f.eval(probe), v);
      for (int c = 0; c < 2; ++c) {
        const double d1 = e[c] - est_mean[c];
        est_mean[c] += d1 / (i + 1);
        est_m2[c] += d1 * (e[c] - est_mean[c]);
      }
    }
    // Independent reference: central differences of the smoothed value.
    // The smoothed quadratic is quadratic, so the difference has no h bias.
    const double h = 0.05;
    const int n_ref = 200000;
    for (int c = 0; c < 2; ++c) {
      Vec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      SmoothedValue vp = smoothed_eval(f, k, delta, xp, n_ref, rng);
      SmoothedValue vm = smoothed_eval(f, k, delta, xm, n_ref, rng);
      const double ref = (vp.mean - vm.mean) / (2.0 * h);
      const double se_est =
          std::sqrt(est_m2[c] / (double(samples) - 1.0) / double(samples));
      const double se_ref =
          std::sqrt(vp.std_error * vp.std_error +
                    vm.std_error * vm.std_error) /
          (2.0 * h);
      const double gap = std::abs(est_mean[c] - ref);
      const double budget = 4.0 * std::sqrt(se_est * se_est + se_ref * se_ref);
      if (gap > budget) {
        out.pass = false;
        out.detail = fmt(
            "one-point mean off by %.5f with budget %.5f", gap, budget);
        return out;
      }
    }
  }

  // Two-point estimator recovers a linear slope exactly in expectation: check
  // the empirical mean against the slope.
  LossFunction lin = linear_loss({2.0, 0.0}, k);
  Vec x{0.1, 0.1};
  Vec mean2(2, 0.0);
  for (int i = 0; i < samples; ++i) {
    Vec v = k.sample_unit_sphere(rng);
    Vec p = x, m = x;
    axpy(delta, v, p);
    axpy(-delta, v, m);
    Vec e = two_point_estimate(k.hull_dim(), delta, lin.eval(p), lin.eval(m), v);
    axpy(1.0 / samples, e, mean2);
  }
  if (std::abs(mean2[0] - 2.0) > 0.05 || std::abs(mean2[1]) > 0.05) {
    out.pass = false;
    out.detail = "two-point mean misses the linear slope";
    return out;
  }
  out.detail = fmt("%d draws per point", samples);
  return out;
}

CheckResult check_estimator_bounds(std::uint64_t seed, int samples) {
  CheckResult out{"estimator_bounds", true, ""};
  Rng rng(seed);
  ConvexDomain k = ConvexDomain::ball({0.0, 0.0}, 1.0);
  const double delta = 0.05;
  ConvexDomain inner = k.shrink(delta);
  LossFunction f = quadratic_loss({0.2, 0.1}, 1.0, k);
  QueryOracle oracle = make_value_oracle(f, NoiseSpec::uniform(0.2));
  const double b0 = oracle.bound;
  const int kk = k.hull_dim();
  int violations_one = 0;
  int violations_two = 0;
  for (int i = 0; i < samples; ++i) {
    Vec x = inner.sample_point(rng);
    Vec v = k.sample_unit_sphere(rng);
    Vec probe = x;
    axpy(delta, v, probe);
    Vec e1 = one_point_estimate(kk, delta, oracle.value(probe, rng), v);
    if (norm2(e1) > double(kk) / delta * b0 + 1e-9) ++violations_one;
    Vec p = x, m = x;
    axpy(delta, v, p);
    axpy(-delta, v, m);
    Vec e2 = two_point_estimate(kk, delta, f.eval(p), f.eval(m), v);
    if (norm2(e2) > double(kk) * f.lipschitz_m1 + 1e-9) ++violations_two;
  }
  if (violations_one > 0 || violations_two > 0) {
    out.pass = false;
    out.detail = fmt("%d one-point and %d two-point bound violations",
                             violations_one, violations_two);
    return out;
  }
  out.detail = fmt("%d draws, zero violations", samples);
  return out;
}

CheckResult check_smoothing(std::uint64_t seed, int samples) {
  CheckResult out{"smoothing", true, ""};
  Rng rng(seed);
  ConvexDomain k = ConvexDomain::box({-1.0, -1.0}, {1.0, 1.0});
  const double alpha = 0.3;
  const double delta = 0.1;
  ConvexDomain inner = k.shrink(alpha);

  LossFunction lip = abs_loss({0.2, -0.1}, 1.5, k);
  LossFunction cvx = quadratic_loss({0.4, 0.3}, 2.0, k);
  for (int pt = 0; pt < 5; ++pt) {
    Vec x = inner.sample_point(rng);
    SmoothedValue sv = smoothed_eval(lip, k, delta, x, samples, rng);
    const double gap_lip = std::abs(sv.mean - lip.eval(x));
    if (gap_lip > delta * lip.lipschitz_m1 + 4.0 * sv.std_error) {
      out.pass = false;
      out.detail =
          fmt("Lipschitz smoothing gap %.5f exceeds the bound",
                      gap_lip);
      return out;
    }
    SmoothedValue sc = smoothed_eval(cvx, k, delta, x, samples, rng);
    const double gap_cvx = std::abs(sc.mean - cvx.eval(x));
    if (gap_cvx >
        2.0 * cvx.bound_m0 * delta / alpha + 4.0 * sc.std_error) {
      out.pass = false;
      out.detail = fmt(
          "bounded-convex smoothing gap %.5f exceeds the bound", gap_cvx);
      return out;
    }
  }
  out.detail = fmt("%d samples per point", samples);
  return out;
}

CheckResult check_coupling(std::uint64_t seed, int horizon) {
  CheckResult out{"coupling", true, ""};
  ConvexDomain k = ConvexDomain::ball({0.0, 0.0}, 1.0);
  SolverConfig solver;
  solver.seed = mix_seed(seed, 99);

  // Replay: a deterministic agent cannot distinguish a fully adaptive
  // opponent from the oblivious replay of the losses it induced.
  {
    AdversarySpec spec;
    spec.type = "sign-follower";
    spec.m1 = 1.0;
    auto adaptive = build_adversary(spec, k, seed, horizon);
    OgdAgent agent(StepSchedule::convex(1.0));
    GameTranscript g1 = run_game(agent, *adaptive, k, horizon, 7, 8);

    std::vector<std::pair<LossFunction, QueryOracle>> rounds;
    for (int t = 0; t < horizon; ++t) {
      rounds.emplace_back(g1.losses[t],
                          make_gradient_oracle(g1.losses[t], 0.0,
                                               NoiseSpec::none(), 2));
    }
    auto replay = replay_adversary(std::move(rounds));
    GameTranscript g2 = run_game(agent, *replay, k, horizon, 7, 8);
    for (int t = 0; t < horizon; ++t) {
      if (g1.rounds[t].action != g2.rounds[t].action) {
        out.pass = false;
        out.detail = "replayed game diverged from the adaptive game";
        return out;
      }
    }
  }

  // Linearization: a semi-bandit agent plays identically against the
  // quadratized opponent, and interval regret never shrinks.
  {
    const double mu = 1.5;
    AdversarySpec spec;
    spec.type = "quadratic-drift";
    spec.mu = mu;
    spec.path_length = 1.0;
    auto base = build_adversary(spec, k, seed + 1, horizon);
    OgdAgent agent(StepSchedule::strongly_convex(mu));
    GameTranscript g1 = run_game(agent, *base, k, horizon, 7, 8);

    auto base2 = build_adversary(spec, k, seed + 1, horizon);
    auto lin = linearize_adversary(std::move(base2), mu, k);
    GameTranscript g2 = run_game(agent, *lin, k, horizon, 7, 8);
    for (int t = 0; t < horizon; ++t) {
      if (g1.rounds[t].action != g2.rounds[t].action) {
        out.pass = false;
        out.detail = "linearized game diverged from the original";
        return out;
      }
    }
    RegretReport r1 = static_regret(g1, k, 1, horizon, solver);
    RegretReport r2 = static_regret(g2, k, 1, horizon, solver);
    if (r2.value < r1.value - 1e-6 * (1.0 + std::abs(r1.value))) {
      out.pass = false;
      out.detail = "quadratized regret fell below the original";
      return out;
    }
  }

  // Surrogate-feedback identity: against a quadratic-surrogate opponent the
  // wrapped agent matches the bare agent exactly.
  {
    const double mu = 0.8;
    AdversarySpec spec;
    spec.type = "quadratic-drift";
    spec.mu = mu;
    spec.path_length = 0.5;
    auto b1 = build_adversary(spec, k, seed + 2, horizon);
    auto q1 = linearize_adversary(std::move(b1), mu, k);
    auto bare = build_ader(k, horizon, 2.0);
    GameTranscript g1 = run_game(*bare, *q1, k, horizon, 7, 8);

    auto b2 = build_adversary(spec, k, seed + 2, horizon);
    auto q2 = linearize_adversary(std::move(b2), mu, k);
    auto wrapped = make_fts(build_ader(k, horizon, 2.0), mu);
    GameTranscript g2 = run_game(*wrapped, *q2, k, horizon, 7, 8);
    for (int t = 0; t < horizon; ++t) {
      if (g1.rounds[t].action != g2.rounds[t].action) {
        out.pass = false;
        out.detail = "surrogate-feedback wrapper diverged from the bare agent";
        return out;
      }
    }
  }

  out.detail = fmt("horizon %d", horizon);
  return out;
}

CheckResult check_quadratization(std::uint64_t seed, int trials) {
  CheckResult out{"quadratization", true, ""};
  Rng rng(seed);
  ConvexDomain k = ConvexDomain::box({-1.0, -1.0}, {1.0, 1.0});
  LossFunction f = quadratic_loss({0.2, -0.3}, 2.0, k);
  for (int i = 0; i < trials; ++i) {
    Vec x = k.sample_point(rng);
    Vec y = k.sample_point(rng);
    for (double mu : {0.0, 1.0, 2.0}) {
      Vec o = f.subgradient_mu(x, mu);
      QuadraticSurrogate q = quadratize(x, o, mu);
      // f(y) - f(x) >= q(y), with q(x) = 0 by construction.
      if (f.eval(y) - f.eval(x) < q.eval(y) - 1e-9) {
        out.pass = false;
        out.detail = "surrogate rose above the loss increment";
        return out;
      }
      if (std::abs(q.eval(x)) > 1e-12) {
        out.pass = false;
        out.detail = "surrogate is nonzero at its anchor";
        return out;
      }
    }
  }
  out.detail = fmt("%d anchor/probe pairs", trials);
  return out;
}

std::vector<std::string> check_suite_names() {
  return {"projection",      "membership",       "sampler",
          "estimator_mean",  "estimator_bounds", "smoothing",
          "coupling",        "quadratization"};
}

CheckResult run_check(const std::string& name) {
  if (name == "projection") return check_projection();
  if (name == "membership") return check_membership();
  if (name == "sampler") return check_sampler();
  if (name == "estimator_mean") return check_estimator_mean();
  if (name == "estimator_bounds") return check_estimator_bounds();
  if (name == "smoothing") return check_smoothing();
  if (name == "coupling") return check_coupling();
  if (name == "quadratization") return check_quadratization();
  throw std::invalid_argument("check: unknown suite '" + name + "'");
}

std::vector<CheckResult> run_all_checks() {
  std::vector<CheckResult> out;
  for (const auto& name : check_suite_names()) out.push_back(run_check(name));
  return out;
}

}  // namespace oco
