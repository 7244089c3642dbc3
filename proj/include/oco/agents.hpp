#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "oco/geometry.hpp"
#include "oco/losses.hpp"
#include "oco/rng.hpp"
#include "oco/vec.hpp"

namespace oco {

// Scalar payload for zeroth-order feedback, vector payload for first-order.
using Observation = std::variant<double, Vec>;

inline double obs_value(const Observation& o) { return std::get<double>(o); }
inline const Vec& obs_vector(const Observation& o) { return std::get<Vec>(o); }

// Round protocol, driven by the game loop:
//   bind(domain, seed)            once per run, resets all state
//   repeat per round t = 1..T:
//     x_t = act()
//     while has_query(): y = next_query(); observe(feedback at y)
//
// Wrappers hold their base agent and drive the base's query loop from inside
// observe(), translating feedback as they go. oracle_order / trivial_query /
// is_deterministic are fixed per type so stacks can be checked when wired.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual int oracle_order() const = 0;
  // True when the agent makes exactly one query per round, at its action.
  virtual bool trivial_query() const = 0;
  virtual bool is_deterministic() const = 0;
  virtual bool needs_deterministic_oracle() const { return false; }

  virtual void bind(const ConvexDomain& k, std::uint64_t seed) = 0;
  virtual const ConvexDomain& domain() const = 0;

  virtual Vec act() = 0;
  virtual bool has_query() const = 0;
  virtual Vec next_query() = 0;
  virtual void observe(const Observation& obs) = 0;
};

struct StepSchedule {
  enum class Kind { kConvex, kStronglyConvex, kFixed };

  Kind kind = Kind::kConvex;
  double m1 = 1.0;    // gradient scale for the convex schedule
  double mu = 1.0;    // strong convexity for the 1/(mu t) schedule
  double eta0 = 0.1;  // fixed step

  static StepSchedule convex(double m1);
  static StepSchedule strongly_convex(double mu);
  static StepSchedule fixed(double eta);

  // Step for round t >= 1; diameter is that of the bound domain.
  double eta(int t, double diameter) const;
};

// Projected online gradient descent.
class OgdAgent final : public Agent {
 public:
  explicit OgdAgent(StepSchedule schedule, std::optional<Vec> x0 = {});

  int oracle_order() const override { return 1; }
  bool trivial_query() const override { return true; }
  bool is_deterministic() const override { return true; }

  void bind(const ConvexDomain& k, std::uint64_t seed) override;
  const ConvexDomain& domain() const override;

  Vec act() override;
  bool has_query() const override;
  Vec next_query() override;
  void observe(const Observation& obs) override;

  const Vec& current() const { return x_; }

 private:
  StepSchedule schedule_;
  std::optional<Vec> x0_;
  std::optional<ConvexDomain> domain_;
  Vec x_;
  int t_ = 0;
  bool awaiting_obs_ = false;
  bool queried_ = false;
};

// Expert aggregation for dynamic regret: a geometric grid of step sizes, one
// descent expert per step size, multiplicative weights over the experts'
// linearized losses. Queries once per expert per round.
class AderAgent final : public Agent {
 public:
  AderAgent(int horizon, double m1);

  int oracle_order() const override { return 1; }
  bool trivial_query() const override { return false; }
  bool is_deterministic() const override { return true; }

  void bind(const ConvexDomain& k, std::uint64_t seed) override;
  const ConvexDomain& domain() const override;

  Vec act() override;
  bool has_query() const override;
  Vec next_query() override;
  void observe(const Observation& obs) override;

  int expert_count() const { return n_experts_; }
  double hedge_rate() const { return beta_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vec>& expert_points() const { return points_; }

  // Transcript of hedge losses per round, for meta-regret checks:
  // row t holds <o_{t,i}, x_{t,i} - x_t> for each expert i.
  const std::vector<std::vector<double>>& surrogate_losses() const {
    return surrogate_losses_;
  }

 private:
  void finish_round();

  int horizon_;
  double m1_;
  std::optional<ConvexDomain> domain_;
  int n_experts_ = 0;
  double beta_ = 0.0;
  std::vector<double> etas_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
  std::vector<Vec> points_;
  std::vector<Vec> grads_;
  Vec combined_;
  int pending_ = 0;   // experts already queried this round
  int observed_ = 0;  // observations received this round
  bool in_round_ = false;
  std::vector<std::vector<double>> surrogate_losses_;
};

std::unique_ptr<Agent> build_ogd(const ConvexDomain& k, StepSchedule schedule,
                                 std::optional<Vec> x0 = {});
std::unique_ptr<Agent> build_ader(const ConvexDomain& k, int horizon,
                                  double m1);

}  // namespace oco
