#pragma once

#include <memory>

#include "oco/agents.hpp"

namespace oco {

// Feedback-reduction wrappers. Each takes ownership of a base agent and is
// itself an Agent; stacks compose. Wiring rules are enforced at construction
// (base order and query policy) and at bind time (shrink amounts against the
// domain's interior radius).
//
// Randomized wrappers draw their probe directions from a child stream of the
// bind seed: the wrapper keeps child(0) and the base is bound with child(1),
// so paired runs can reproduce either side of the reduction exactly.

// Full information to semi-bandit: query once at the action, answer the
// base's queries from the gradient of the quadratic surrogate built there.
std::unique_ptr<Agent> make_fts(std::unique_ptr<Agent> base, double mu);

// Play the base on the alpha-shrunk domain.
std::unique_ptr<Agent> make_restrict(std::unique_ptr<Agent> base,
                                     double alpha);

// First-order base to zeroth-order feedback: base lives on the alpha-shrunk
// domain, each base query y is answered with a one-point gradient estimate
// from a single value probe at y + delta v. Requires delta <= alpha.
std::unique_ptr<Agent> make_fotzo(std::unique_ptr<Agent> base, double alpha,
                                  double delta);

// Semi-bandit base to bandit: play x + delta v, probe the value there, feed
// the base a one-point estimate. Requires delta <= alpha.
std::unique_ptr<Agent> make_stb(std::unique_ptr<Agent> base, double alpha,
                                double delta);

// First-order base to deterministic zeroth-order feedback with two value
// probes y +- delta v per base query; base lives on the delta-shrunk domain.
std::unique_ptr<Agent> make_fotzo_2p(std::unique_ptr<Agent> base,
                                     double delta);

}  // namespace oco
