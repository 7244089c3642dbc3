#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oco/agents.hpp"
#include "oco/geometry.hpp"
#include "oco/losses.hpp"

namespace oco {

// Chooses the round-t loss and feedback channel, seeing all actions played so
// far (x_t included, so fully adaptive opponents are expressible). The oracle
// stream is threaded through choose so opponents that consult an oracle
// themselves stay coupled with the game's query loop.
class Adversary {
 public:
  virtual ~Adversary() = default;

  virtual std::pair<LossFunction, QueryOracle> choose(
      int t, const std::vector<Vec>& actions, Rng& oracle_rng) = 0;

  // Ignores all actions.
  virtual bool oblivious() const = 0;
  // Depends on x_1..x_{t-1} only.
  virtual bool weakly_adaptive() const = 0;

  // Reference sequence for dynamic regret, when the family defines one
  // (the drift minimizers).
  virtual std::optional<std::vector<Vec>> natural_comparator() const {
    return std::nullopt;
  }
};

struct AdversarySpec {
  std::string type;          // linear-random | quadratic-drift | abs-drift |
                             // fixed-repeat | sign-follower
  double m1 = 1.0;           // slope scale for linear / abs families
  double mu = 1.0;           // curvature for the quadratic family
  double path_length = 0.0;  // drift budget; 0 freezes the minimizer
  int oracle_order = 1;
  NoiseSpec noise;
  std::shared_ptr<AdversarySpec> inner;  // fixed-repeat payload
};

std::unique_ptr<Adversary> build_adversary(const AdversarySpec& spec,
                                           const ConvexDomain& k,
                                           std::uint64_t seed, int horizon);

// Replays a recorded sequence of (loss, oracle) pairs; oblivious.
std::unique_ptr<Adversary> replay_adversary(
    std::vector<std::pair<LossFunction, QueryOracle>> rounds);

// Round-by-round quadratization of a first-order opponent: the round-t loss
// becomes <o_t, y - x_t> + mu/2 ||y - x_t||^2 with o_t the base oracle's
// answer at x_t, served through a deterministic first-order oracle.
std::unique_ptr<Adversary> linearize_adversary(std::unique_ptr<Adversary> base,
                                               double mu,
                                               const ConvexDomain& k);

struct QueryRecord {
  Vec point;
  Observation obs;
};

struct RoundRecord {
  Vec action;
  std::vector<QueryRecord> queries;
  double true_loss = 0.0;
};

struct GameTranscript {
  std::vector<RoundRecord> rounds;
  std::vector<LossFunction> losses;
  std::uint64_t agent_seed = 0;
  std::uint64_t oracle_seed = 0;

  int horizon() const { return static_cast<int>(rounds.size()); }
  std::vector<Vec> actions() const;
  std::vector<double> true_losses() const;
};

GameTranscript run_game(Agent& agent, Adversary& adversary,
                        const ConvexDomain& k, int horizon,
                        std::uint64_t agent_seed, std::uint64_t oracle_seed);

struct SolverConfig {
  int iterations = 2000;
  int restarts = 8;
  double tolerance = 1e-6;
  std::uint64_t seed = 9001;
  // Grid cross-check (d <= 2) runs only when the interval has at most this
  // many losses; it is exhaustive and priced per point.
  long long grid_max_terms = 1024;
  bool grid_check = true;
};

struct SolveResult {
  Vec point;
  double value = 0.0;  // sum over the losses at point
  bool converged = false;
};

// min_u sum_t f_t(u) by projected subgradient descent on the mean loss with
// iterate averaging, multi-start, and (for d <= 2) a 401-point-per-axis grid
// refinement.
SolveResult comparator_solve(std::span<const LossFunction> losses,
                             const ConvexDomain& k, const SolverConfig& cfg);

struct RegretReport {
  double value = 0.0;
  Vec comparator;
  int a = 1;
  int b = 1;
  bool solver_converged = false;
};

RegretReport static_regret(const GameTranscript& g, const ConvexDomain& k,
                           int a, int b, const SolverConfig& cfg);

// Regret against an explicit comparator sequence (must lie in k).
double dynamic_regret(const GameTranscript& g, const ConvexDomain& k,
                      const std::vector<Vec>& comparators);

// Regret against the best per-round points: sum_t (f_t(x_t) - min_u f_t(u)).
double full_dynamic_regret(const GameTranscript& g, const ConvexDomain& k,
                           const SolverConfig& cfg);

struct AdaptiveResult {
  double value = 0.0;
  int a = 1;
  int b = 1;
  bool exact = true;  // false once the strided scan kicks in (lower bound)
};

// max over intervals [a,b] of the interval's static regret. Exact scan up to
// exact_cap rounds, strided endpoints beyond that.
AdaptiveResult adaptive_regret(const GameTranscript& g, const ConvexDomain& k,
                               const SolverConfig& cfg, int exact_cap = 4096);

double path_length(std::span<const Vec> points);

}  // namespace oco
