#include "oco/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "oco/meta.hpp"

namespace oco {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

Vec get_vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw ConfigError(field, "expected a nonempty array of numbers");
  Vec out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(field, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

NoiseSpec parse_noise(const json& j, const std::string& field) {
  if (j.is_null()) return NoiseSpec::none();
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  const std::string type = j.value("type", "none");
  if (type == "none") return NoiseSpec::none();
  if (type == "uniform") {
    if (!j.contains("width")) throw ConfigError(field + ".width", "required");
    return NoiseSpec::uniform(get_number(j.at("width"), field + ".width"));
  }
  if (type == "gaussian") {
    if (!j.contains("sigma") || !j.contains("clip"))
      throw ConfigError(field, "gaussian noise needs sigma and clip");
    return NoiseSpec::gaussian(get_number(j.at("sigma"), field + ".sigma"),
                               get_number(j.at("clip"), field + ".clip"));
  }
  throw ConfigError(field + ".type", "unknown noise type '" + type + "'");
}

AdversarySpec parse_adversary(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  AdversarySpec spec;
  spec.type = j.value("type", "");
  if (spec.type.empty()) throw ConfigError(field + ".type", "required");
  spec.m1 = j.contains("m1") ? get_number(j.at("m1"), field + ".m1") : 1.0;
  spec.mu = j.contains("mu") ? get_number(j.at("mu"), field + ".mu") : 1.0;
  spec.path_length =
      j.contains("path_length")
          ? get_number(j.at("path_length"), field + ".path_length")
          : 0.0;
  if (spec.path_length < 0.0)
    throw ConfigError(field + ".path_length", "must be nonnegative");
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    if (!o.is_object()) throw ConfigError(field + ".oracle", "expected object");
    spec.oracle_order = o.value("order", 1);
    if (spec.oracle_order != 0 && spec.oracle_order != 1)
      throw ConfigError(field + ".oracle.order", "must be 0 or 1");
    if (o.contains("noise"))
      spec.noise = parse_noise(o.at("noise"), field + ".oracle.noise");
  }
  if (j.contains("inner")) {
    spec.inner = std::make_shared<AdversarySpec>(
        parse_adversary(j.at("inner"), field + ".inner"));
  }
  if (spec.type == "fixed-repeat" && !spec.inner)
    throw ConfigError(field + ".inner", "required for fixed-repeat");
  return spec;
}

void parse_shrink_param(const json& j, const std::string& field,
                        std::optional<double>& out) {
  if (j.is_string()) {
    if (j.get<std::string>() != "auto")
      throw ConfigError(field, "expected a number or \"auto\"");
    out.reset();
    return;
  }
  out = get_number(j, field);
}

StackEntrySpec parse_stack_entry(const json& j, const std::string& field) {
  StackEntrySpec e;
  if (j.is_string()) {
    e.name = j.get<std::string>();
    return e;
  }
  if (!j.is_object())
    throw ConfigError(field, "expected a name or an object with a name");
  e.name = j.value("name", "");
  if (e.name.empty()) throw ConfigError(field + ".name", "required");
  if (j.contains("mu")) e.mu = get_number(j.at("mu"), field + ".mu");
  if (j.contains("alpha")) parse_shrink_param(j.at("alpha"), field + ".alpha", e.alpha);
  if (j.contains("delta")) parse_shrink_param(j.at("delta"), field + ".delta", e.delta);
  if (j.contains("coupling")) {
    e.coupling = j.at("coupling").get<std::string>();
    if (e.coupling != "convex" && e.coupling != "strongly-convex")
      throw ConfigError(field + ".coupling",
                        "must be convex or strongly-convex");
  }
  if (j.contains("x0")) e.x0 = get_vec(j.at("x0"), field + ".x0");
  if (j.contains("m1")) {
    if (j.at("m1").is_string()) {
      if (j.at("m1").get<std::string>() != "auto")
        throw ConfigError(field + ".m1", "expected a number or \"auto\"");
      e.ader_m1_auto = true;
    } else {
      e.ader_m1 = get_number(j.at("m1"), field + ".m1");
      e.ader_m1_auto = false;
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    if (!s.is_object()) throw ConfigError(field + ".schedule", "expected object");
    e.schedule.kind = s.value("kind", "convex");
    if (e.schedule.kind != "convex" && e.schedule.kind != "strongly-convex" &&
        e.schedule.kind != "fixed")
      throw ConfigError(field + ".schedule.kind",
                        "must be convex, strongly-convex, or fixed");
    if (s.contains("m1")) {
      if (s.at("m1").is_string()) {
        if (s.at("m1").get<std::string>() != "auto")
          throw ConfigError(field + ".schedule.m1",
                            "expected a number or \"auto\"");
        e.schedule.m1_auto = true;
      } else {
        e.schedule.m1 = get_number(s.at("m1"), field + ".schedule.m1");
        e.schedule.m1_auto = false;
      }
    }
    if (s.contains("mu"))
      e.schedule.mu = get_number(s.at("mu"), field + ".schedule.mu");
    if (s.contains("eta"))
      e.schedule.eta = get_number(s.at("eta"), field + ".schedule.eta");
  }
  return e;
}

}  // namespace

ConvexDomain build_domain(const DomainSpec& spec) {
  try {
    if (spec.type == "box") return ConvexDomain::box(spec.lo, spec.hi);
    if (spec.type == "ball") return ConvexDomain::ball(spec.center, spec.radius);
    if (spec.type == "simplex") return ConvexDomain::simplex(spec.dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain", e.what());
  }
  throw ConfigError("domain.type", "unknown domain type '" + spec.type + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");

  ExperimentConfig cfg;
  try {

  if (!j.contains("domain")) throw ConfigError("domain", "required");
  {
    const json& d = j.at("domain");
    if (!d.is_object()) throw ConfigError("domain", "expected an object");
    cfg.domain.type = d.value("type", "");
    if (cfg.domain.type == "box") {
      if (!d.contains("lo") || !d.contains("hi"))
        throw ConfigError("domain", "box needs lo and hi");
      cfg.domain.lo = get_vec(d.at("lo"), "domain.lo");
      cfg.domain.hi = get_vec(d.at("hi"), "domain.hi");
    } else if (cfg.domain.type == "ball") {
      if (!d.contains("center") || !d.contains("radius"))
        throw ConfigError("domain", "ball needs center and radius");
      cfg.domain.center = get_vec(d.at("center"), "domain.center");
      cfg.domain.radius = get_number(d.at("radius"), "domain.radius");
    } else if (cfg.domain.type == "simplex") {
      if (!d.contains("dim")) throw ConfigError("domain.dim", "required");
      cfg.domain.dim = d.at("dim").get<int>();
    } else {
      throw ConfigError("domain.type",
                        "unknown domain type '" + cfg.domain.type + "'");
    }
  }

  if (!j.contains("adversary")) throw ConfigError("adversary", "required");
  cfg.adversary = parse_adversary(j.at("adversary"), "adversary");

  if (!j.contains("agent")) throw ConfigError("agent", "required");
  {
    const json& a = j.at("agent");
    if (!a.is_object() || !a.contains("stack"))
      throw ConfigError("agent.stack", "required");
    const json& s = a.at("stack");
    if (!s.is_array() || s.empty())
      throw ConfigError("agent.stack", "expected a nonempty array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      cfg.stack.push_back(parse_stack_entry(
          s[i], "agent.stack[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("T") && j.contains("T_list"))
    throw ConfigError("T", "give either T or T_list, not both");
  if (j.contains("T")) {
    cfg.horizons = {j.at("T").get<int>()};
  } else if (j.contains("T_list")) {
    for (const auto& e : j.at("T_list")) cfg.horizons.push_back(e.get<int>());
  } else {
    throw ConfigError("T", "required (or T_list)");
  }
  for (int t : cfg.horizons) {
    if (t < 1) throw ConfigError("T", "horizons must be positive");
  }
  if (cfg.horizons.empty()) throw ConfigError("T_list", "must be nonempty");
  for (std::size_t i = 1; i < cfg.horizons.size(); ++i) {
    if (cfg.horizons[i] <= cfg.horizons[i - 1])
      throw ConfigError("T_list", "must be strictly ascending");
  }

  cfg.seeds = j.value("seeds", 1);
  if (cfg.seeds < 1) throw ConfigError("seeds", "must be positive");
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});

  if (j.contains("regret")) {
    cfg.regret_kinds.clear();
    for (const auto& e : j.at("regret")) {
      const std::string kind = e.get<std::string>();
      if (kind != "static" && kind != "dynamic" && kind != "adaptive")
        throw ConfigError("regret",
                          "kinds are static, dynamic, adaptive; got '" + kind +
                              "'");
      cfg.regret_kinds.push_back(kind);
    }
    if (cfg.regret_kinds.empty())
      throw ConfigError("regret", "must be nonempty");
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    cfg.solver.iterations = s.value("iterations", cfg.solver.iterations);
    cfg.solver.restarts = s.value("restarts", cfg.solver.restarts);
    cfg.solver.tolerance = s.value("tolerance", cfg.solver.tolerance);
    cfg.solver.grid_max_terms =
        s.value("grid_max_terms", cfg.solver.grid_max_terms);
    cfg.solver.grid_check = s.value("grid_check", cfg.solver.grid_check);
    if (cfg.solver.iterations < 1 || cfg.solver.restarts < 1 ||
        cfg.solver.tolerance <= 0.0)
      throw ConfigError("solver", "iterations, restarts, tolerance must be "
                                  "positive");
  }
  cfg.adaptive_cap = j.value("adaptive_cap", cfg.adaptive_cap);
  if (cfg.adaptive_cap < 1)
    throw ConfigError("adaptive_cap", "must be positive");

  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("malformed value: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

double default_shrink(const std::string& coupling, int horizon) {
  if (coupling == "strongly-convex")
    return 1.0 / std::sqrt(double(horizon) * std::log(double(horizon)));
  return std::pow(double(horizon), -0.25);
}

double default_two_point_probe(int horizon) { return 1.0 / double(horizon); }

double effective_feedback_bound(const ExperimentConfig& cfg,
                                const ConvexDomain& k, int horizon) {
  // Loss-family scale on the full domain.
  const AdversarySpec* fam = &cfg.adversary;
  while (fam->type == "fixed-repeat" && fam->inner) fam = fam->inner.get();
  const double diam = k.diameter();
  double m1_family = fam->m1;
  if (fam->type == "quadratic-drift") m1_family = fam->mu * diam;
  double m0_family = m1_family * diam;
  if (fam->type == "quadratic-drift")
    m0_family = 0.5 * fam->mu * diam * diam;
  if (fam->type == "linear-random" || fam->type == "sign-follower")
    m0_family = fam->m1 * k.max_distance(Vec(k.ambient_dim(), 0.0));

  double bound = cfg.adversary.oracle_order == 0
                     ? m0_family + cfg.adversary.noise.max_magnitude()
                     : m1_family + cfg.adversary.noise.max_magnitude() *
                                       std::sqrt(double(k.ambient_dim()));
  const int kk = k.hull_dim();
  // Outermost wrapper first; each translates the bound it feeds inward.
  for (std::size_t i = 0; i + 1 < cfg.stack.size(); ++i) {
    const StackEntrySpec& e = cfg.stack[i];
    if (e.name == "stb" || e.name == "fotzo") {
      const double delta =
          e.delta ? *e.delta : default_shrink(e.coupling, horizon);
      bound = double(kk) / delta * bound;
    } else if (e.name == "fotzo_2p") {
      bound = double(kk) * m1_family;
    } else if (e.name == "fts") {
      bound = bound + e.mu * diam;
    }
    // restrict leaves the bound unchanged
  }
  return std::max(bound, 1e-12);
}

std::unique_ptr<Agent> build_stack(const ExperimentConfig& cfg,
                                   const ConvexDomain& k, int horizon) {
  if (cfg.stack.empty()) throw ConfigError("agent.stack", "must be nonempty");
  const StackEntrySpec& base = cfg.stack.back();
  const double auto_bound = effective_feedback_bound(cfg, k, horizon);

  std::unique_ptr<Agent> agent;
  try {
    if (base.name == "ogd") {
      StepSchedule sched = StepSchedule::fixed(base.schedule.eta);
      if (base.schedule.kind == "convex") {
        sched = StepSchedule::convex(base.schedule.m1_auto ? auto_bound
                                                           : base.schedule.m1);
      } else if (base.schedule.kind == "strongly-convex") {
        sched = StepSchedule::strongly_convex(base.schedule.mu);
      }
      agent = std::make_unique<OgdAgent>(sched, base.x0);
    } else if (base.name == "ader") {
      const double m1 = base.ader_m1_auto ? auto_bound : base.ader_m1;
      agent = std::make_unique<AderAgent>(horizon, m1);
    } else {
      throw ConfigError("agent.stack",
                        "base must be ogd or ader; got '" + base.name + "'");
    }

    for (std::size_t ri = cfg.stack.size() - 1; ri-- > 0;) {
      const StackEntrySpec& e = cfg.stack[ri];
      if (e.name == "fts") {
        agent = make_fts(std::move(agent), e.mu);
      } else if (e.name == "restrict") {
        if (!e.alpha)
          throw ConfigError("agent.stack.restrict.alpha", "required");
        agent = make_restrict(std::move(agent), *e.alpha);
      } else if (e.name == "fotzo" || e.name == "stb") {
        const double alpha =
            e.alpha ? *e.alpha : default_shrink(e.coupling, horizon);
        const double delta =
            e.delta ? *e.delta : default_shrink(e.coupling, horizon);
        agent = e.name == "fotzo"
                    ? make_fotzo(std::move(agent), alpha, delta)
                    : make_stb(std::move(agent), alpha, delta);
      } else if (e.name == "fotzo_2p") {
        const double delta =
            e.delta ? *e.delta : default_two_point_probe(horizon);
        agent = make_fotzo_2p(std::move(agent), delta);
      } else {
        throw ConfigError("agent.stack",
                          "unknown wrapper '" + e.name + "'");
      }
    }
    // Early bind so shrink amounts are checked against the domain now.
    agent->bind(k, 0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("agent.stack", e.what());
  }
  return agent;
}

}  // namespace oco
