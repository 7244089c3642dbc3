#include "oco/meta.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace oco {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

class FtsAgent final : public Agent {
 public:
  FtsAgent(std::unique_ptr<Agent> base, double mu)
      : base_(std::move(base)), mu_(mu) {
    require(base_ != nullptr, "fts: base agent is required");
    require(std::isfinite(mu) && mu >= 0.0, "fts: mu must be nonnegative");
    require(base_->oracle_order() == 1,
            "fts: base must consume first-order feedback");
  }

  int oracle_order() const override { return 1; }
  bool trivial_query() const override { return true; }
  bool is_deterministic() const override { return base_->is_deterministic(); }

  void bind(const ConvexDomain& k, std::uint64_t seed) override {
    base_->bind(k, mix_seed(seed, 1));
    domain_ = k;
    awaiting_obs_ = false;
    queried_ = false;
  }

  const ConvexDomain& domain() const override {
    require(domain_.has_value(), "fts: agent is not bound to a domain");
    return *domain_;
  }

  Vec act() override {
    require(!awaiting_obs_, "fts: previous round still awaiting feedback");
    x_ = base_->act();
    awaiting_obs_ = true;
    queried_ = false;
    return x_;
  }

  bool has_query() const override { return awaiting_obs_ && !queried_; }

  Vec next_query() override {
    require(has_query(), "fts: no pending query");
    queried_ = true;
    return x_;
  }

  void observe(const Observation& obs) override {
    require(awaiting_obs_ && queried_, "fts: observe without a pending query");
    const Vec& o = obs_vector(obs);
    // Answer every base query with the surrogate's gradient o + mu (y - x).
    while (base_->has_query()) {
      Vec y = base_->next_query();
      Vec g = o;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += mu_ * (y[i] - x_[i]);
      base_->observe(Observation{std::move(g)});
    }
    awaiting_obs_ = false;
  }

 private:
  std::unique_ptr<Agent> base_;
  double mu_;
  std::optional<ConvexDomain> domain_;
  Vec x_;
  bool awaiting_obs_ = false;
  bool queried_ = false;
};

class RestrictAgent final : public Agent {
 public:
  RestrictAgent(std::unique_ptr<Agent> base, double alpha)
      : base_(std::move(base)), alpha_(alpha) {
    require(base_ != nullptr, "restrict: base agent is required");
    require(std::isfinite(alpha) && alpha >= 0.0,
            "restrict: alpha must be nonnegative");
  }

  int oracle_order() const override { return base_->oracle_order(); }
  bool trivial_query() const override { return base_->trivial_query(); }
  bool is_deterministic() const override { return base_->is_deterministic(); }
  bool needs_deterministic_oracle() const override {
    return base_->needs_deterministic_oracle();
  }

  void bind(const ConvexDomain& k, std::uint64_t seed) override {
    require(alpha_ < k.interior_radius(),
            "restrict: alpha must be below the domain's interior_radius");
    base_->bind(k.shrink(alpha_), mix_seed(seed, 1));
    domain_ = k;
  }

  const ConvexDomain& domain() const override {
    require(domain_.has_value(), "restrict: agent is not bound to a domain");
    return *domain_;
  }

  Vec act() override { return base_->act(); }
  bool has_query() const override { return base_->has_query(); }
  Vec next_query() override { return base_->next_query(); }
  void observe(const Observation& obs) override { base_->observe(obs); }

 private:
  std::unique_ptr<Agent> base_;
  double alpha_;
  std::optional<ConvexDomain> domain_;
};

class FotzoAgent final : public Agent {
 public:
  FotzoAgent(std::unique_ptr<Agent> base, double alpha, double delta)
      : base_(std::move(base)), alpha_(alpha), delta_(delta), rng_(0) {
    require(base_ != nullptr, "fotzo: base agent is required");
    require(base_->oracle_order() == 1,
            "fotzo: base must consume first-order feedback");
    require(std::isfinite(delta) && delta > 0.0,
            "fotzo: delta must be positive");
    require(std::isfinite(alpha) && alpha >= delta,
            "fotzo: requires delta <= alpha");
  }

  int oracle_order() const override { return 0; }
  bool trivial_query() const override { return false; }
  bool is_deterministic() const override { return false; }

  void bind(const ConvexDomain& k, std::uint64_t seed) override {
    require(alpha_ < k.interior_radius(),
            "fotzo: alpha must be below the domain's interior_radius");
    rng_ = Rng(mix_seed(seed, 0));
    base_->bind(k.shrink(alpha_), mix_seed(seed, 1));
    domain_ = k;
    pending_.reset();
  }

  const ConvexDomain& domain() const override {
    require(domain_.has_value(), "fotzo: agent is not bound to a domain");
    return *domain_;
  }

  Vec act() override { return base_->act(); }

  bool has_query() const override {
    return pending_.has_value() || base_->has_query();
  }

  Vec next_query() override {
    require(!pending_.has_value(), "fotzo: previous probe still unanswered");
    require(base_->has_query(), "fotzo: no pending query");
    Vec y = base_->next_query();
    Vec v = domain_->sample_unit_sphere(rng_);
    Vec probe = y;
    axpy(delta_, v, probe);
    pending_ = Probe{std::move(v)};
    return probe;
  }

  void observe(const Observation& obs) override {
    require(pending_.has_value(), "fotzo: observe without a pending probe");
    const double val = obs_value(obs);
    Vec est = one_point_estimate(domain_->hull_dim(), delta_, val, pending_->v);
    pending_.reset();
    base_->observe(Observation{std::move(est)});
  }

 private:
  struct Probe {
    Vec v;
  };

  std::unique_ptr<Agent> base_;
  double alpha_;
  double delta_;
  Rng rng_;
  std::optional<ConvexDomain> domain_;
  std::optional<Probe> pending_;
};

class StbAgent final : public Agent {
 public:
  StbAgent(std::unique_ptr<Agent> base, double alpha, double delta)
      : base_(std::move(base)), alpha_(alpha), delta_(delta), rng_(0) {
    require(base_ != nullptr, "stb: base agent is required");
    require(base_->oracle_order() == 1 && base_->trivial_query(),
            "stb: base must be semi-bandit (first-order, query at action)");
    require(std::isfinite(delta) && delta > 0.0,
            "stb: delta must be positive");
    require(std::isfinite(alpha) && alpha >= delta,
            "stb: requires delta <= alpha");
  }

  int oracle_order() const override { return 0; }
  bool trivial_query() const override { return true; }
  bool is_deterministic() const override { return false; }

  void bind(const ConvexDomain& k, std::uint64_t seed) override {
    require(alpha_ < k.interior_radius(),
            "stb: alpha must be below the domain's interior_radius");
    rng_ = Rng(mix_seed(seed, 0));
    base_->bind(k.shrink(alpha_), mix_seed(seed, 1));
    domain_ = k;
    awaiting_obs_ = false;
    queried_ = false;
  }

  const ConvexDomain& domain() const override {
    require(domain_.has_value(), "stb: agent is not bound to a domain");
    return *domain_;
  }

  Vec act() override {
    require(!awaiting_obs_, "stb: previous round still awaiting feedback");
    v_ = domain_->sample_unit_sphere(rng_);
    Vec x = base_->act();
    played_ = x;
    axpy(delta_, v_, played_);
    awaiting_obs_ = true;
    queried_ = false;
    return played_;
  }

  bool has_query() const override { return awaiting_obs_ && !queried_; }

  Vec next_query() override {
    require(has_query(), "stb: no pending query");
    queried_ = true;
    return played_;
  }

  void observe(const Observation& obs) override {
    require(awaiting_obs_ && queried_, "stb: observe without a pending query");
    const double val = obs_value(obs);
    Vec est = one_point_estimate(domain_->hull_dim(), delta_, val, v_);
    require(base_->has_query(), "stb: base did not request feedback");
    base_->next_query();
    base_->observe(Observation{std::move(est)});
    awaiting_obs_ = false;
  }

 private:
  std::unique_ptr<Agent> base_;
  double alpha_;
  double delta_;
  Rng rng_;
  std::optional<ConvexDomain> domain_;
  Vec v_;
  Vec played_;
  bool awaiting_obs_ = false;
  bool queried_ = false;
};

class Fotzo2pAgent final : public Agent {
 public:
  Fotzo2pAgent(std::unique_ptr<Agent> base, double delta)
      : base_(std::move(base)), delta_(delta), rng_(0) {
    require(base_ != nullptr, "fotzo_2p: base agent is required");
    require(base_->oracle_order() == 1,
            "fotzo_2p: base must consume first-order feedback");
    require(std::isfinite(delta) && delta > 0.0,
            "fotzo_2p: delta must be positive");
  }

  int oracle_order() const override { return 0; }
  bool trivial_query() const override { return false; }
  bool is_deterministic() const override { return false; }
  bool needs_deterministic_oracle() const override { return true; }

  void bind(const ConvexDomain& k, std::uint64_t seed) override {
    require(delta_ < k.interior_radius(),
            "fotzo_2p: delta must be below the domain's interior_radius");
    rng_ = Rng(mix_seed(seed, 0));
    base_->bind(k.shrink(delta_), mix_seed(seed, 1));
    domain_ = k;
    stage_ = Stage::kIdle;
  }

  const ConvexDomain& domain() const override {
    require(domain_.has_value(), "fotzo_2p: agent is not bound to a domain");
    return *domain_;
  }

  Vec act() override { return base_->act(); }

  bool has_query() const override {
    return stage_ == Stage::kMinusPending || base_->has_query();
  }

  Vec next_query() override {
    if (stage_ == Stage::kMinusPending) {
      stage_ = Stage::kAwaitingMinus;
      Vec probe = y_;
      axpy(-delta_, v_, probe);
      return probe;
    }
    require(stage_ == Stage::kIdle, "fotzo_2p: probe still unanswered");
    require(base_->has_query(), "fotzo_2p: no pending query");
    y_ = base_->next_query();
    v_ = domain_->sample_unit_sphere(rng_);
    stage_ = Stage::kAwaitingPlus;
    Vec probe = y_;
    axpy(delta_, v_, probe);
    return probe;
  }

  void observe(const Observation& obs) override {
    if (stage_ == Stage::kAwaitingPlus) {
      f_plus_ = obs_value(obs);
      stage_ = Stage::kMinusPending;
      return;
    }
    require(stage_ == Stage::kAwaitingMinus,
            "fotzo_2p: observe without a pending probe");
    const double f_minus = obs_value(obs);
    Vec est =
        two_point_estimate(domain_->hull_dim(), delta_, f_plus_, f_minus, v_);
    stage_ = Stage::kIdle;
    base_->observe(Observation{std::move(est)});
  }

 private:
  enum class Stage { kIdle, kAwaitingPlus, kMinusPending, kAwaitingMinus };

  std::unique_ptr<Agent> base_;
  double delta_;
  Rng rng_;
  std::optional<ConvexDomain> domain_;
  Vec y_;
  Vec v_;
  double f_plus_ = 0.0;
  Stage stage_ = Stage::kIdle;
};

}  // namespace

std::unique_ptr<Agent> make_fts(std::unique_ptr<Agent> base, double mu) {
  return std::make_unique<FtsAgent>(std::move(base), mu);
}

std::unique_ptr<Agent> make_restrict(std::unique_ptr<Agent> base,
                                     double alpha) {
  return std::make_unique<RestrictAgent>(std::move(base), alpha);
}

std::unique_ptr<Agent> make_fotzo(std::unique_ptr<Agent> base, double alpha,
                                  double delta) {
  return std::make_unique<FotzoAgent>(std::move(base), alpha, delta);
}

std::unique_ptr<Agent> make_stb(std::unique_ptr<Agent> base, double alpha,
                                double delta) {
  return std::make_unique<StbAgent>(std::move(base), alpha, delta);
}

std::unique_ptr<Agent> make_fotzo_2p(std::unique_ptr<Agent> base,
                                     double delta) {
  return std::make_unique<Fotzo2pAgent>(std::move(base), delta);
}

}  // namespace oco
