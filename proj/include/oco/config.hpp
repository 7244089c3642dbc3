#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oco/agents.hpp"
#include "oco/arena.hpp"
#include "oco/geometry.hpp"

namespace oco {

// Configuration problem; the field names the offending key or rule.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_in, const std::string& msg)
      : std::runtime_error(field_in + ": " + msg), field(std::move(field_in)) {}
};

struct DomainSpec {
  std::string type;  // box | ball | simplex
  Vec lo, hi;
  Vec center;
  double radius = 0.0;
  int dim = 0;
};

ConvexDomain build_domain(const DomainSpec& spec);

struct ScheduleSpec {
  std::string kind = "convex";  // convex | strongly-convex | fixed
  double m1 = 0.0;              // 0 with m1_auto selects the derived bound
  bool m1_auto = true;
  double mu = 1.0;
  double eta = 0.1;
};

struct StackEntrySpec {
  std::string name;  // ogd | ader | fts | restrict | fotzo | stb | fotzo_2p
  // wrapper parameters
  double mu = 0.0;
  std::optional<double> alpha;  // empty selects the horizon-default coupling
  std::optional<double> delta;
  std::string coupling = "convex";  // convex | strongly-convex
  // base parameters
  ScheduleSpec schedule;
  double ader_m1 = 0.0;
  bool ader_m1_auto = true;
  std::optional<Vec> x0;
};

struct ExperimentConfig {
  DomainSpec domain;
  AdversarySpec adversary;
  std::vector<StackEntrySpec> stack;  // outermost first, base last
  std::vector<int> horizons;
  int seeds = 1;
  std::uint64_t master_seed = 1;
  std::vector<std::string> regret_kinds = {"static"};
  SolverConfig solver;
  // Horizons up to this get the exact O(T^2)-interval adaptive scan; larger
  // ones fall back to strided endpoints (a lower bound).
  int adaptive_cap = 512;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Default shrink couplings for a horizon: T^(-1/4) for the convex coupling,
// (T ln T)^(-1/2) for the strongly convex one, and 1/T for two-point probes.
double default_shrink(const std::string& coupling, int horizon);
double default_two_point_probe(int horizon);

// Resolves horizon-dependent parameters and wires the stack inside out.
// Throws ConfigError for illegal wiring or parameter rules. The returned
// agent is bound to the domain (seed 0); run_game rebinds per run.
std::unique_ptr<Agent> build_stack(const ExperimentConfig& cfg,
                                   const ConvexDomain& k, int horizon);

// Conservative bound on the feedback magnitudes the innermost learner sees,
// used when a schedule's gradient scale is left to "auto".
double effective_feedback_bound(const ExperimentConfig& cfg,
                                const ConvexDomain& k, int horizon);

}  // namespace oco
