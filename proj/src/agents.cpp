#include "oco/agents.hpp"

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

}  // namespace

StepSchedule StepSchedule::convex(double m1) {
  require(std::isfinite(m1) && m1 > 0.0,
          "schedule: convex gradient scale must be positive");
  StepSchedule s;
  s.kind = Kind::kConvex;
  s.m1 = m1;
  return s;
}

StepSchedule StepSchedule::strongly_convex(double mu) {
  require(std::isfinite(mu) && mu > 0.0,
          "schedule: strong convexity must be positive");
  StepSchedule s;
  s.kind = Kind::kStronglyConvex;
  s.mu = mu;
  return s;
}

StepSchedule StepSchedule::fixed(double eta) {
  require(std::isfinite(eta) && eta > 0.0,
          "schedule: fixed step must be positive");
  StepSchedule s;
  s.kind = Kind::kFixed;
  s.eta0 = eta;
  return s;
}

double StepSchedule::eta(int t, double diameter) const {
  require(t >= 1, "schedule: round index starts at 1");
  switch (kind) {
    case Kind::kConvex:
      return diameter / (m1 * std::sqrt(double(t)));
    case Kind::kStronglyConvex:
      return 1.0 / (mu * double(t));
    case Kind::kFixed:
      return eta0;
  }
  return eta0;
}

OgdAgent::OgdAgent(StepSchedule schedule, std::optional<Vec> x0)
    : schedule_(schedule), x0_(std::move(x0)) {}

void OgdAgent::bind(const ConvexDomain& k, std::uint64_t) {
  if (x0_) {
    require(k.contains(*x0_), "ogd: start point must lie in the domain");
    x_ = *x0_;
  } else {
    x_ = k.interior_center();
  }
  domain_ = k;
  t_ = 0;
  awaiting_obs_ = false;
  queried_ = false;
}

const ConvexDomain& OgdAgent::domain() const {
  require(domain_.has_value(), "ogd: agent is not bound to a domain");
  return *domain_;
}

Vec OgdAgent::act() {
  require(domain_.has_value(), "ogd: agent is not bound to a domain");
  require(!awaiting_obs_, "ogd: previous round still awaiting feedback");
  ++t_;
  awaiting_obs_ = true;
  queried_ = false;
  return x_;
}

bool OgdAgent::has_query() const { return awaiting_obs_ && !queried_; }

Vec OgdAgent::next_query() {
  require(has_query(), "ogd: no pending query");
  queried_ = true;
  return x_;
}

void OgdAgent::observe(const Observation& obs) {
  require(awaiting_obs_ && queried_, "ogd: observe without a pending query");
  const Vec& g = obs_vector(obs);
  require(g.size() == x_.size(), "ogd: gradient dimension mismatch");
  Vec step = x_;
  axpy(-schedule_.eta(t_, domain_->diameter()), g, step);
  x_ = domain_->project(step);
  awaiting_obs_ = false;
}

AderAgent::AderAgent(int horizon, double m1) : horizon_(horizon), m1_(m1) {
  require(horizon >= 2, "ader: horizon must be at least 2");
  require(std::isfinite(m1) && m1 > 0.0,
          "ader: gradient scale must be positive");
}

void AderAgent::bind(const ConvexDomain& k, std::uint64_t) {
  domain_ = k;
  const double diam = k.diameter();
  n_experts_ =
      static_cast<int>(std::ceil(0.5 * std::log2(double(horizon_)))) + 1;
  beta_ = std::sqrt(8.0 * std::log(double(n_experts_)) / double(horizon_)) /
          (m1_ * diam);
  const double eta1 = diam / (m1_ * std::sqrt(double(horizon_)));
  etas_.resize(n_experts_);
  for (int i = 0; i < n_experts_; ++i) etas_[i] = std::ldexp(eta1, i);
  log_weights_.assign(n_experts_, -std::log(double(n_experts_)));
  weights_.assign(n_experts_, 1.0 / n_experts_);
  points_.assign(n_experts_, k.interior_center());
  grads_.assign(n_experts_, Vec(k.ambient_dim(), 0.0));
  combined_.clear();
  pending_ = 0;
  observed_ = 0;
  in_round_ = false;
  surrogate_losses_.clear();
}

const ConvexDomain& AderAgent::domain() const {
  require(domain_.has_value(), "ader: agent is not bound to a domain");
  return *domain_;
}

Vec AderAgent::act() {
  require(domain_.has_value(), "ader: agent is not bound to a domain");
  require(!in_round_, "ader: previous round still awaiting feedback");
  combined_.assign(domain_->ambient_dim(), 0.0);
  for (int i = 0; i < n_experts_; ++i)
    axpy(weights_[i], points_[i], combined_);
  // Convex combinations can drift out by rounding; snap back.
  combined_ = domain_->project(combined_);
  in_round_ = true;
  pending_ = 0;
  observed_ = 0;
  return combined_;
}

bool AderAgent::has_query() const {
  return in_round_ && pending_ < n_experts_;
}

Vec AderAgent::next_query() {
  require(has_query(), "ader: no pending query");
  require(pending_ == observed_, "ader: previous query still unanswered");
  return points_[pending_++];
}

void AderAgent::observe(const Observation& obs) {
  require(in_round_ && observed_ < pending_,
          "ader: observe without a pending query");
  const Vec& g = obs_vector(obs);
  require(static_cast<int>(g.size()) == domain_->ambient_dim(),
          "ader: gradient dimension mismatch");
  grads_[observed_++] = g;
  if (observed_ == n_experts_) finish_round();
}

void AderAgent::finish_round() {
  std::vector<double> losses(n_experts_);
  for (int i = 0; i < n_experts_; ++i) {
    losses[i] = dot(grads_[i], sub(points_[i], combined_));
  }
  surrogate_losses_.push_back(losses);

  // Hedge update in log space.
  double lse_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_experts_; ++i) {
    log_weights_[i] -= beta_ * losses[i];
    lse_max = std::max(lse_max, log_weights_[i]);
  }
  double z = 0.0;
  for (double lw : log_weights_) z += std::exp(lw - lse_max);
  const double log_z = lse_max + std::log(z);
  for (int i = 0; i < n_experts_; ++i) {
    log_weights_[i] -= log_z;
    weights_[i] = std::exp(log_weights_[i]);
  }

  // Per-expert descent step with its own step size.
  for (int i = 0; i < n_experts_; ++i) {
    Vec step = points_[i];
    axpy(-etas_[i], grads_[i], step);
    points_[i] = domain_->project(step);
  }
  in_round_ = false;
}

std::unique_ptr<Agent> build_ogd(const ConvexDomain& k, StepSchedule schedule,
                                 std::optional<Vec> x0) {
  auto agent = std::make_unique<OgdAgent>(schedule, std::move(x0));
  agent->bind(k, 0);
  return agent;
}

std::unique_ptr<Agent> build_ader(const ConvexDomain& k, int horizon,
                                  double m1) {
  auto agent = std::make_unique<AderAgent>(horizon, m1);
  agent->bind(k, 0);
  return agent;
}

}  // namespace oco
