#include "oco/arena.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace oco {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_run(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

QueryOracle attach_oracle(const LossFunction& f, const AdversarySpec& spec,
                          const ConvexDomain& k) {
  if (spec.oracle_order == 0) return make_value_oracle(f, spec.noise);
  return make_gradient_oracle(f, 0.0, spec.noise, k.ambient_dim());
}

// Seeded piecewise-constant drift: the minimizer starts at an interior anchor
// and spends its whole arc-length budget on a few jumps at seeded rounds in
// seeded hull directions. Concentrating the budget keeps the tracking problem
// hard at every horizon; a budget spread evenly across rounds is absorbed by
// any curvature-exploiting learner into O(1) total regret. Each jump target
// is projected back into the set, so the realized path length never exceeds
// the budget (projection is nonexpansive) and every point stays feasible.
std::vector<Vec> drift_path(const ConvexDomain& k, double budget, int horizon,
                            Rng& rng) {
  Vec anchor = k.interior_center();
  {
    Vec u = k.sample_unit_ball(rng);
    axpy(0.4 * k.interior_radius(), u, anchor);
  }
  std::vector<Vec> path(horizon, anchor);
  if (budget <= 0.0 || horizon < 2) return path;
  const int jumps = std::min(4, horizon - 1);
  std::vector<int> jump_rounds;
  for (int j = 1; j <= jumps; ++j) {
    const double frac =
        (double(j) + 0.4 * (rng.uniform() - 0.5)) / (double(jumps) + 1.0);
    int t = static_cast<int>(frac * horizon);
    t = std::clamp(t, 1, horizon - 1);
    jump_rounds.push_back(t);
  }
  std::sort(jump_rounds.begin(), jump_rounds.end());
  Vec current = anchor;
  std::size_t next_jump = 0;
  for (int t = 0; t < horizon; ++t) {
    while (next_jump < jump_rounds.size() && t == jump_rounds[next_jump]) {
      Vec target = current;
      axpy(budget / double(jumps), k.sample_unit_sphere(rng), target);
      current = k.project(target);
      ++next_jump;
    }
    path[t] = current;
  }
  return path;
}

class LinearRandomAdversary final : public Adversary {
 public:
  LinearRandomAdversary(const ConvexDomain& k, double m1, std::uint64_t seed,
                        int horizon)
      : k_(k) {
    Rng rng(seed);
    slopes_.reserve(horizon);
    for (int t = 0; t < horizon; ++t)
      slopes_.push_back(scaled(k.sample_unit_sphere(rng), m1));
  }

  std::pair<LossFunction, QueryOracle> choose(int t, const std::vector<Vec>&,
                                              Rng&) override {
    check_run(t >= 1 && t <= static_cast<int>(slopes_.size()),
              "linear-random: round outside the materialized horizon");
    LossFunction f = linear_loss(slopes_[t - 1], k_);
    return {f, attach_oracle(f, spec_, k_)};
  }

  bool oblivious() const override { return true; }
  bool weakly_adaptive() const override { return true; }

  AdversarySpec spec_;
  ConvexDomain k_;
  std::vector<Vec> slopes_;
};

class QuadraticDriftAdversary final : public Adversary {
 public:
  QuadraticDriftAdversary(const ConvexDomain& k, double mu, double budget,
                          std::uint64_t seed, int horizon)
      : k_(k), mu_(mu) {
    Rng rng(seed);
    path_ = drift_path(k, budget, horizon, rng);
  }

  std::pair<LossFunction, QueryOracle> choose(int t, const std::vector<Vec>&,
                                              Rng&) override {
    check_run(t >= 1 && t <= static_cast<int>(path_.size()),
              "quadratic-drift: round outside the materialized horizon");
    LossFunction f = quadratic_loss(path_[t - 1], mu_, k_);
    return {f, attach_oracle(f, spec_, k_)};
  }

  bool oblivious() const override { return true; }
  bool weakly_adaptive() const override { return true; }

  std::optional<std::vector<Vec>> natural_comparator() const override {
    return path_;
  }

  AdversarySpec spec_;
  ConvexDomain k_;
  double mu_;
  std::vector<Vec> path_;
};

class AbsDriftAdversary final : public Adversary {
 public:
  AbsDriftAdversary(const ConvexDomain& k, double m1, double budget,
                    std::uint64_t seed, int horizon)
      : k_(k), m1_(m1) {
    Rng rng(seed);
    path_ = drift_path(k, budget, horizon, rng);
  }

  std::pair<LossFunction, QueryOracle> choose(int t, const std::vector<Vec>&,
                                              Rng&) override {
    check_run(t >= 1 && t <= static_cast<int>(path_.size()),
              "abs-drift: round outside the materialized horizon");
    LossFunction f = abs_loss(path_[t - 1], m1_, k_);
    return {f, attach_oracle(f, spec_, k_)};
  }

  bool oblivious() const override { return true; }
  bool weakly_adaptive() const override { return true; }

  std::optional<std::vector<Vec>> natural_comparator() const override {
    return path_;
  }

  AdversarySpec spec_;
  ConvexDomain k_;
  double m1_;
  std::vector<Vec> path_;
};

// Repeats the inner adversary's first round forever; the oracle keeps drawing
// fresh noise from the game stream, which is the stochastic-regret setting.
class FixedRepeatAdversary final : public Adversary {
 public:
  explicit FixedRepeatAdversary(std::unique_ptr<Adversary> inner) {
    require(inner != nullptr, "fixed-repeat: inner adversary is required");
    require(inner->oblivious(),
            "fixed-repeat: inner adversary must be oblivious");
    Rng scratch(0);
    fixed_ = inner->choose(1, {}, scratch);
  }

  std::pair<LossFunction, QueryOracle> choose(int, const std::vector<Vec>&,
                                              Rng&) override {
    return fixed_;
  }

  bool oblivious() const override { return true; }
  bool weakly_adaptive() const override { return true; }

  std::pair<LossFunction, QueryOracle> fixed_;
};

class SignFollowerAdversary final : public Adversary {
 public:
  SignFollowerAdversary(const ConvexDomain& k, double m1) : k_(k), m1_(m1) {}

  std::pair<LossFunction, QueryOracle> choose(int t,
                                              const std::vector<Vec>& actions,
                                              Rng&) override {
    check_run(static_cast<int>(actions.size()) >= t,
              "sign-follower: current action is required");
    const Vec& x = actions[t - 1];
    const double scale = m1_ / std::sqrt(double(k_.ambient_dim()));
    Vec slope(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      slope[i] = (x[i] >= 0.0 ? scale : -scale);
    LossFunction f = linear_loss(slope, k_);
    return {f, attach_oracle(f, spec_, k_)};
  }

  bool oblivious() const override { return false; }
  bool weakly_adaptive() const override { return false; }

  AdversarySpec spec_;
  ConvexDomain k_;
  double m1_;
};

class ReplayAdversary final : public Adversary {
 public:
  explicit ReplayAdversary(
      std::vector<std::pair<LossFunction, QueryOracle>> rounds)
      : rounds_(std::move(rounds)) {}

  std::pair<LossFunction, QueryOracle> choose(int t, const std::vector<Vec>&,
                                              Rng&) override {
    check_run(t >= 1 && t <= static_cast<int>(rounds_.size()),
              "replay: round outside the recorded horizon");
    return rounds_[t - 1];
  }

  bool oblivious() const override { return true; }
  bool weakly_adaptive() const override { return true; }

  std::vector<std::pair<LossFunction, QueryOracle>> rounds_;
};

class LinearizeAdversary final : public Adversary {
 public:
  LinearizeAdversary(std::unique_ptr<Adversary> base, double mu,
                     const ConvexDomain& k)
      : base_(std::move(base)), mu_(mu), k_(k) {
    require(base_ != nullptr, "linearize: base adversary is required");
    require(std::isfinite(mu) && mu >= 0.0,
            "linearize: mu must be nonnegative");
  }

  std::pair<LossFunction, QueryOracle> choose(int t,
                                              const std::vector<Vec>& actions,
                                              Rng& oracle_rng) override {
    check_run(static_cast<int>(actions.size()) >= t,
              "linearize: current action is required");
    auto [f, oracle] = base_->choose(t, actions, oracle_rng);
    check_run(oracle.order == 1,
              "linearize: base adversary must serve first-order feedback");
    const Vec& x = actions[t - 1];
    Vec o = oracle.gradient(x, oracle_rng);
    QuadraticSurrogate q = quadratize(x, o, mu_);
    LossFunction qf = surrogate_loss(q, k_);
    QueryOracle det;
    det.order = 1;
    det.deterministic = true;
    det.bound = qf.lipschitz_m1;
    det.grad_fn = [q](const Vec& y, Rng&) { return q.gradient(y); };
    return {qf, det};
  }

  bool oblivious() const override { return false; }
  bool weakly_adaptive() const override { return false; }

  std::unique_ptr<Adversary> base_;
  double mu_;
  ConvexDomain k_;
};

// Wraps a fixed-repeat with a constant comparator path of the right horizon.
class FixedRepeatWithPath final : public Adversary {
 public:
  FixedRepeatWithPath(std::unique_ptr<Adversary> inner, int horizon,
                      std::optional<Vec> comparator)
      : inner_(std::move(inner)) {
    if (comparator) path_.assign(horizon, *comparator);
  }

  std::pair<LossFunction, QueryOracle> choose(int t,
                                              const std::vector<Vec>& actions,
                                              Rng& rng) override {
    return inner_->choose(t, actions, rng);
  }

  bool oblivious() const override { return true; }
  bool weakly_adaptive() const override { return true; }

  std::optional<std::vector<Vec>> natural_comparator() const override {
    if (path_.empty()) return std::nullopt;
    return path_;
  }

  std::unique_ptr<Adversary> inner_;
  std::vector<Vec> path_;
};

}  // namespace

std::unique_ptr<Adversary> build_adversary(const AdversarySpec& spec,
                                           const ConvexDomain& k,
                                           std::uint64_t seed, int horizon) {
  require(horizon >= 1, "adversary: horizon must be positive");
  require(spec.oracle_order == 0 || spec.oracle_order == 1,
          "adversary: oracle order must be 0 or 1");
  if (spec.type == "linear-random") {
    auto a = std::make_unique<LinearRandomAdversary>(k, spec.m1, seed, horizon);
    a->spec_ = spec;
    return a;
  }
  if (spec.type == "quadratic-drift") {
    require(spec.mu > 0.0, "quadratic-drift: mu must be positive");
    auto a = std::make_unique<QuadraticDriftAdversary>(
        k, spec.mu, spec.path_length, seed, horizon);
    a->spec_ = spec;
    return a;
  }
  if (spec.type == "abs-drift") {
    require(spec.m1 > 0.0, "abs-drift: m1 must be positive");
    auto a = std::make_unique<AbsDriftAdversary>(k, spec.m1, spec.path_length,
                                                 seed, horizon);
    a->spec_ = spec;
    return a;
  }
  if (spec.type == "fixed-repeat") {
    require(spec.inner != nullptr,
            "fixed-repeat: inner adversary spec is required");
    AdversarySpec inner_spec = *spec.inner;
    // The repeated round serves through the outer oracle spec.
    inner_spec.oracle_order = spec.oracle_order;
    inner_spec.noise = spec.noise;
    auto inner = build_adversary(inner_spec, k, seed, 1);
    std::optional<Vec> comparator;
    if (auto path = inner->natural_comparator(); path && !path->empty())
      comparator = path->front();
    auto fixed = std::make_unique<FixedRepeatAdversary>(std::move(inner));
    return std::make_unique<FixedRepeatWithPath>(std::move(fixed), horizon,
                                                 comparator);
  }
  if (spec.type == "sign-follower") {
    require(spec.m1 > 0.0, "sign-follower: m1 must be positive");
    auto a = std::make_unique<SignFollowerAdversary>(k, spec.m1);
    a->spec_ = spec;
    return a;
  }
  throw std::invalid_argument("adversary: unknown type '" + spec.type + "'");
}

std::unique_ptr<Adversary> replay_adversary(
    std::vector<std::pair<LossFunction, QueryOracle>> rounds) {
  require(!rounds.empty(), "replay: at least one round is required");
  return std::make_unique<ReplayAdversary>(std::move(rounds));
}

std::unique_ptr<Adversary> linearize_adversary(std::unique_ptr<Adversary> base,
                                               double mu,
                                               const ConvexDomain& k) {
  return std::make_unique<LinearizeAdversary>(std::move(base), mu, k);
}

std::vector<Vec> GameTranscript::actions() const {
  std::vector<Vec> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.action);
  return out;
}

std::vector<double> GameTranscript::true_losses() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.true_loss);
  return out;
}

GameTranscript run_game(Agent& agent, Adversary& adversary,
                        const ConvexDomain& k, int horizon,
                        std::uint64_t agent_seed, std::uint64_t oracle_seed) {
  require(horizon >= 1, "run_game: horizon must be positive");
  agent.bind(k, agent_seed);
  Rng oracle_rng(oracle_seed);

  GameTranscript g;
  g.agent_seed = agent_seed;
  g.oracle_seed = oracle_seed;
  g.rounds.reserve(horizon);
  g.losses.reserve(horizon);
  std::vector<Vec> actions;
  actions.reserve(horizon);

  for (int t = 1; t <= horizon; ++t) {
    RoundRecord round;
    round.action = agent.act();
    check_run(k.contains(round.action),
              "run_game: agent action left the domain at round " +
                  std::to_string(t));
    actions.push_back(round.action);

    auto [loss, oracle] = adversary.choose(t, actions, oracle_rng);
    if (agent.needs_deterministic_oracle()) {
      check_run(oracle.deterministic,
                "run_game: agent requires a deterministic oracle but the "
                "adversary served a stochastic one");
    }

    int queries = 0;
    while (agent.has_query()) {
      QueryRecord rec;
      rec.point = agent.next_query();
      check_run(k.contains(rec.point),
                "run_game: query point left the domain at round " +
                    std::to_string(t));
      if (agent.trivial_query()) {
        check_run(queries == 0 && rec.point == round.action,
                  "run_game: trivial-query agent must query exactly once at "
                  "its action");
      }
      if (oracle.order == 0) {
        const double val = oracle.value(rec.point, oracle_rng);
        check_run(std::isfinite(val), "run_game: oracle returned a non-finite "
                                      "value");
        rec.obs = Observation{val};
      } else {
        Vec gvec = oracle.gradient(rec.point, oracle_rng);
        check_run(all_finite(gvec),
                  "run_game: oracle returned a non-finite gradient");
        rec.obs = Observation{std::move(gvec)};
      }
      agent.observe(rec.obs);
      round.queries.push_back(std::move(rec));
      ++queries;
    }

    round.true_loss = loss.eval(round.action);
    g.losses.push_back(std::move(loss));
    g.rounds.push_back(std::move(round));
  }
  return g;
}

namespace {

struct MeanLoss {
  std::span<const LossFunction> losses;

  double value(const Vec& u) const {
    double s = 0.0;
    for (const auto& f : losses) s += f.eval(u);
    return s / double(losses.size());
  }

  Vec gradient(const Vec& u) const {
    Vec g(u.size(), 0.0);
    for (const auto& f : losses) {
      Vec gi = f.subgrad(u);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gi[i];
    }
    const double inv = 1.0 / double(losses.size());
    for (double& c : g) c *= inv;
    return g;
  }
};

struct DescentOutcome {
  Vec point;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

DescentOutcome descend(const MeanLoss& mean, const ConvexDomain& k, Vec start,
                       int iterations, double tolerance, double mu_bar,
                       double lip_bar) {
  const double diam = k.diameter();
  Vec u = k.project(start);
  Vec avg = u;
  DescentOutcome best;
  best.point = u;
  best.value = mean.value(u);

  const int check_every = 16;
  double last_best = best.value;
  int stable_checks = 0;

  for (int j = 1; j <= iterations; ++j) {
    Vec g = mean.gradient(u);
    const double eta = mu_bar > 1e-12
                           ? 1.0 / (mu_bar * double(j))
                           : diam / (std::max(lip_bar, 1e-12) *
                                     std::sqrt(double(j)));
    axpy(-eta, g, u);
    u = k.project(u);
    for (std::size_t i = 0; i < avg.size(); ++i)
      avg[i] += (u[i] - avg[i]) / double(j + 1);

    if (j % check_every == 0 || j == iterations) {
      const double vu = mean.value(u);
      if (vu < best.value) {
        best.value = vu;
        best.point = u;
      }
      const double va = mean.value(avg);
      if (va < best.value) {
        best.value = va;
        best.point = avg;
      }
      if (std::abs(last_best - best.value) <=
          tolerance * std::max(1.0, std::abs(best.value))) {
        if (++stable_checks >= 3) {
          best.converged = true;
          break;
        }
      } else {
        stable_checks = 0;
      }
      last_best = best.value;
    }
  }
  return best;
}

}  // namespace

SolveResult comparator_solve(std::span<const LossFunction> losses,
                             const ConvexDomain& k, const SolverConfig& cfg) {
  require(!losses.empty(), "comparator_solve: at least one loss is required");
  require(cfg.iterations >= 1 && cfg.restarts >= 1,
          "comparator_solve: iterations and restarts must be positive");

  // When every term carries a curvature form the sum is one isotropic
  // quadratic (or affine) objective, so the constrained minimizer is exact:
  // project the stationary point, or take a support point in the affine case.
  bool structured = true;
  for (const auto& f : losses) {
    if (!f.form) {
      structured = false;
      break;
    }
  }
  if (structured) {
    const int d = k.ambient_dim();
    double mu_sum = 0.0;
    Vec w(static_cast<std::size_t>(d), 0.0);  // sum of mu_t m_t - slope_t
    for (const auto& f : losses) {
      mu_sum += f.form->mu;
      for (int i = 0; i < d; ++i)
        w[static_cast<std::size_t>(i)] +=
            f.form->mu * f.form->anchor[static_cast<std::size_t>(i)] -
            f.form->slope[static_cast<std::size_t>(i)];
    }
    SolveResult out;
    out.point = mu_sum > 0.0 ? k.project(scaled(w, 1.0 / mu_sum))
                             : k.support_point(w);
    out.converged = true;
    double total = 0.0;
    for (const auto& f : losses) total += f.eval(out.point);
    out.value = total;
    return out;
  }

  MeanLoss mean{losses};

  double mu_bar = 0.0;
  double lip_bar = 0.0;
  for (const auto& f : losses) {
    mu_bar += f.strong_convexity;
    lip_bar += f.lipschitz_m1;
  }
  mu_bar /= double(losses.size());
  lip_bar /= double(losses.size());

  Rng rng(cfg.seed);
  DescentOutcome best;
  for (int r = 0; r < cfg.restarts; ++r) {
    Vec start = r == 0 ? k.interior_center() : k.sample_point(rng);
    DescentOutcome out = descend(mean, k, std::move(start), cfg.iterations,
                                 cfg.tolerance, mu_bar, lip_bar);
    if (out.value < best.value) best = out;
  }

  const bool grid_applies =
      cfg.grid_check && k.ambient_dim() <= 2 &&
      static_cast<long long>(losses.size()) <= cfg.grid_max_terms;
  if (grid_applies) {
    const int n = 401;
    const int d = k.ambient_dim();
    Vec lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      Vec dir(d, 0.0);
      dir[i] = 1.0;
      hi[i] = k.support(dir);
      dir[i] = -1.0;
      lo[i] = -k.support(dir);
    }
    Vec probe(d);
    DescentOutcome grid_best;
    const int n1 = d >= 2 ? n : 1;
    for (int i = 0; i < n; ++i) {
      probe[0] = lo[0] + (hi[0] - lo[0]) * double(i) / double(n - 1);
      for (int j = 0; j < n1; ++j) {
        if (d >= 2)
          probe[1] = lo[1] + (hi[1] - lo[1]) * double(j) / double(n - 1);
        Vec p = k.project(probe);
        const double v = mean.value(p);
        if (v < grid_best.value) {
          grid_best.value = v;
          grid_best.point = std::move(p);
        }
      }
    }
    // Polish the grid winner so discretization does not limit accuracy.
    DescentOutcome polished =
        descend(mean, k, grid_best.point, std::min(cfg.iterations, 256),
                cfg.tolerance, mu_bar, lip_bar);
    if (grid_best.value < best.value) best = grid_best;
    if (polished.value < best.value) best = polished;
  }

  SolveResult out;
  out.point = best.point;
  out.converged = best.converged || grid_applies;
  double total = 0.0;
  for (const auto& f : losses) total += f.eval(best.point);
  out.value = total;
  return out;
}

RegretReport static_regret(const GameTranscript& g, const ConvexDomain& k,
                           int a, int b, const SolverConfig& cfg) {
  require(a >= 1 && a <= b && b <= g.horizon(),
          "static_regret: need 1 <= a <= b <= horizon");
  SolveResult sol = comparator_solve(
      std::span<const LossFunction>(g.losses.data() + (a - 1), b - a + 1), k,
      cfg);
  double played = 0.0;
  for (int t = a; t <= b; ++t) played += g.rounds[t - 1].true_loss;
  RegretReport out;
  out.value = played - sol.value;
  out.comparator = sol.point;
  out.a = a;
  out.b = b;
  out.solver_converged = sol.converged;
  return out;
}

double dynamic_regret(const GameTranscript& g, const ConvexDomain& k,
                      const std::vector<Vec>& comparators) {
  require(static_cast<int>(comparators.size()) == g.horizon(),
          "dynamic_regret: comparator sequence length must equal the horizon");
  double played = 0.0;
  double reference = 0.0;
  for (int t = 0; t < g.horizon(); ++t) {
    require(k.contains(comparators[t]),
            "dynamic_regret: comparator point outside the domain");
    played += g.rounds[t].true_loss;
    reference += g.losses[t].eval(comparators[t]);
  }
  return played - reference;
}

double full_dynamic_regret(const GameTranscript& g, const ConvexDomain& k,
                           const SolverConfig& cfg) {
  double total = 0.0;
  for (int t = 0; t < g.horizon(); ++t) {
    SolveResult sol = comparator_solve(
        std::span<const LossFunction>(g.losses.data() + t, 1), k, cfg);
    total += g.rounds[t].true_loss - sol.value;
  }
  return total;
}

AdaptiveResult adaptive_regret(const GameTranscript& g, const ConvexDomain& k,
                               const SolverConfig& cfg, int exact_cap) {
  const int horizon = g.horizon();
  AdaptiveResult out;
  out.value = -std::numeric_limits<double>::infinity();
  const bool exact = horizon <= exact_cap;
  const int stride = exact ? 1 : std::max(1, horizon / 64);
  for (int a = 1; a <= horizon; a += stride) {
    for (int b = a; b <= horizon; b += stride) {
      const int bb = exact ? b : std::min(horizon, b + stride - 1);
      RegretReport r = static_regret(g, k, a, bb, cfg);
      if (r.value > out.value) {
        out.value = r.value;
        out.a = a;
        out.b = bb;
      }
      if (!exact && bb == horizon) break;
    }
  }
  out.exact = exact;
  return out;
}

double path_length(std::span<const Vec> points) {
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < points.size(); ++t)
    total += distance(points[t], points[t + 1]);
  return total;
}

}  // namespace oco
