#include "oco/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "oco/arena.hpp"
#include "oco/rng.hpp"

namespace oco {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double order_quantile_90(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(0.9 * n));
  if (rank == 0) rank = 1;
  return values[rank - 1];
}

struct CellSeeds {
  std::uint64_t adversary;
  std::uint64_t agent;
  std::uint64_t oracle;
  std::uint64_t solver;
};

CellSeeds derive_cell_seeds(std::uint64_t master, int horizon, int seed_index) {
  const std::uint64_t cell =
      mix_seed(mix_seed(master, static_cast<std::uint64_t>(horizon)),
               static_cast<std::uint64_t>(seed_index));
  return {mix_seed(cell, 1), mix_seed(cell, 2), mix_seed(cell, 3),
          mix_seed(cell, 4)};
}

struct CellOutput {
  std::vector<SweepRow> rows;
  std::optional<SweepFailure> failure;
};

CellOutput run_cell(const ExperimentConfig& cfg, const ConvexDomain& k,
                    int horizon, int seed_index) {
  CellOutput out;
  try {
    const CellSeeds seeds =
        derive_cell_seeds(cfg.master_seed, horizon, seed_index);
    auto adversary = build_adversary(cfg.adversary, k, seeds.adversary, horizon);
    auto agent = build_stack(cfg, k, horizon);

    const auto game_start = std::chrono::steady_clock::now();
    const GameTranscript transcript =
        run_game(*agent, *adversary, k, horizon, seeds.agent, seeds.oracle);
    const double game_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - game_start)
            .count();

    SolverConfig solver = cfg.solver;
    solver.seed = seeds.solver;

    for (const std::string& kind : cfg.regret_kinds) {
      const auto kind_start = std::chrono::steady_clock::now();
      double value = 0.0;
      if (kind == "static") {
        value = static_regret(transcript, k, 1, horizon, solver).value;
      } else if (kind == "dynamic") {
        auto path = adversary->natural_comparator();
        if (!path) {
          throw std::runtime_error(
              "dynamic regret requested but the adversary supplies no "
              "comparator sequence");
        }
        value = dynamic_regret(transcript, k, *path);
      } else if (kind == "adaptive") {
        value = adaptive_regret(transcript, k, solver, cfg.adaptive_cap).value;
      } else {
        throw std::runtime_error("unknown regret kind: " + kind);
      }
      const double kind_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - kind_start)
              .count();
      out.rows.push_back({horizon, seed_index, kind, value, game_ms + kind_ms});
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.failure = SweepFailure{horizon, seed_index, e.what()};
  }
  return out;
}

}  // namespace

SlopeFitOutcome fit_log2_slope(
    const std::vector<std::pair<double, double>>& xy) {
  SlopeFitOutcome out;
  if (xy.size() < 3) {
    out.diagnostic = "slope fit needs at least 3 points, got " +
                     std::to_string(xy.size());
    return out;
  }
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0)) {
      out.diagnostic = "nonpositive abscissa " + format_double(x);
      return out;
    }
    if (!(y > 0.0)) {
      out.diagnostic =
          "nonpositive mean regret " + format_double(y) + " at T=" +
          format_double(x) + "; log-log fit refused";
      return out;
    }
  }
  const double n = static_cast<double>(xy.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : xy) {
    const double lx = std::log2(x);
    const double ly = std::log2(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double var_x = sxx - sx * sx / n;
  if (var_x <= 1e-12) {
    out.diagnostic = "degenerate abscissae: all T equal";
    return out;
  }
  const double cov = sxy - sx * sy / n;
  const double var_y = syy - sy * sy / n;
  SlopeFit fit;
  fit.slope = cov / var_x;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = var_y <= 1e-12 ? 1.0 : (cov * cov) / (var_x * var_y);
  out.fit = fit;
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs) {
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  const ConvexDomain k = build_domain(cfg.domain);

  struct Cell {
    int horizon;
    int seed_index;
  };
  std::vector<Cell> cells;
  for (int horizon : cfg.horizons)
    for (int s = 0; s < cfg.seeds; ++s) cells.push_back({horizon, s});

  std::vector<CellOutput> outputs(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      outputs[i] = run_cell(cfg, k, cells[i].horizon, cells[i].seed_index);
    }
  };
  const int thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (auto& out : outputs) {
    for (auto& row : out.rows) result.rows.push_back(std::move(row));
    if (out.failure) result.failures.push_back(std::move(*out.failure));
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              return std::tie(a.kind, a.horizon, a.seed) <
                     std::tie(b.kind, b.horizon, b.seed);
            });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const SweepFailure& a, const SweepFailure& b) {
              return std::tie(a.horizon, a.seed) < std::tie(b.horizon, b.seed);
            });

  for (const std::string& kind : cfg.regret_kinds) {
    std::vector<std::pair<double, double>> fit_points;
    for (int horizon : cfg.horizons) {
      std::vector<double> values;
      for (const SweepRow& row : result.rows)
        if (row.kind == kind && row.horizon == horizon)
          values.push_back(row.value);
      if (values.empty()) continue;
      SweepAggregate agg;
      agg.horizon = horizon;
      agg.kind = kind;
      agg.count = static_cast<int>(values.size());
      double sum = 0.0;
      for (double v : values) sum += v;
      agg.mean = sum / static_cast<double>(values.size());
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
        const double sd =
            std::sqrt(ss / static_cast<double>(values.size() - 1));
        agg.std_error = sd / std::sqrt(static_cast<double>(values.size()));
      }
      agg.q90 = order_quantile_90(values);
      result.aggregates.push_back(agg);
      fit_points.emplace_back(static_cast<double>(horizon), agg.mean);
    }
    result.fits[kind] = fit_log2_slope(fit_points);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "T,seed,regret_kind,value,runtime_ms\n";
  for (const SweepRow& row : result.rows) {
    out += std::to_string(row.horizon);
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    out += row.kind;
    out += ',';
    out += format_double(row.value);
    out += ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", row.runtime_ms);
    out += buf;
    out += '\n';
  }
  return out;
}

std::string sweep_json(const ExperimentConfig& cfg, const SweepResult& result) {
  json root;
  root["master_seed"] = cfg.master_seed;
  root["seeds"] = cfg.seeds;
  root["horizons"] = cfg.horizons;
  json kinds = json::object();
  for (const std::string& kind : cfg.regret_kinds) {
    json block;
    json aggs = json::array();
    for (const SweepAggregate& agg : result.aggregates) {
      if (agg.kind != kind) continue;
      aggs.push_back({{"T", agg.horizon},
                      {"count", agg.count},
                      {"mean", agg.mean},
                      {"std_error", agg.std_error},
                      {"q90", agg.q90}});
    }
    block["aggregates"] = std::move(aggs);
    const auto it = result.fits.find(kind);
    if (it != result.fits.end() && it->second.fit) {
      const SlopeFit& fit = *it->second.fit;
      block["slope_fit"] = {
          {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    } else {
      block["slope_fit"] = nullptr;
      block["slope_diagnostic"] =
          it != result.fits.end() ? it->second.diagnostic : "no data";
    }
    kinds[kind] = std::move(block);
  }
  root["kinds"] = std::move(kinds);
  json failures = json::array();
  for (const SweepFailure& f : result.failures)
    failures.push_back(
        {{"T", f.horizon}, {"seed", f.seed}, {"error", f.error}});
  root["failures"] = std::move(failures);
  return root.dump(2) + "\n";
}

RunArtifacts run_single(const ExperimentConfig& cfg) {
  if (cfg.horizons.size() != 1) {
    throw ConfigError("T", "run expects a single horizon; use sweep for T_list");
  }
  const int horizon = cfg.horizons.front();
  const ConvexDomain k = build_domain(cfg.domain);
  const CellSeeds seeds = derive_cell_seeds(cfg.master_seed, horizon, 0);
  auto adversary = build_adversary(cfg.adversary, k, seeds.adversary, horizon);
  auto agent = build_stack(cfg, k, horizon);
  const GameTranscript transcript =
      run_game(*agent, *adversary, k, horizon, seeds.agent, seeds.oracle);

  RunArtifacts artifacts;
  std::string& csv = artifacts.transcript_csv;
  csv = "t";
  for (int i = 0; i < k.ambient_dim(); ++i) csv += ",x" + std::to_string(i);
  csv += ",true_loss\n";
  for (int t = 1; t <= horizon; ++t) {
    const auto& round = transcript.rounds[static_cast<std::size_t>(t - 1)];
    csv += std::to_string(t);
    for (double c : round.action) {
      csv += ',';
      csv += format_double(c);
    }
    csv += ',';
    csv += format_double(round.true_loss);
    csv += '\n';
  }

  SolverConfig solver = cfg.solver;
  solver.seed = seeds.solver;
  json report;
  report["T"] = horizon;
  report["static_regret"] = nullptr;
  report["dynamic_regret"] = nullptr;
  report["adaptive_regret"] = nullptr;
  report["comparator"] = nullptr;
  report["slope_fit"] = nullptr;    // needs a sweep over several T
  report["quantile_p90"] = nullptr; // needs several seeds
  for (const std::string& kind : cfg.regret_kinds) {
    if (kind == "static") {
      const RegretReport rep = static_regret(transcript, k, 1, horizon, solver);
      report["static_regret"] = rep.value;
      report["comparator"] = rep.comparator;
    } else if (kind == "dynamic") {
      auto path = adversary->natural_comparator();
      if (!path) {
        throw std::runtime_error(
            "dynamic regret requested but the adversary supplies no "
            "comparator sequence");
      }
      report["dynamic_regret"] = dynamic_regret(transcript, k, *path);
    } else if (kind == "adaptive") {
      const AdaptiveResult adaptive =
          adaptive_regret(transcript, k, solver, cfg.adaptive_cap);
      report["adaptive_regret"] = adaptive.value;
      report["adaptive_interval"] = {adaptive.a, adaptive.b};
      report["adaptive_exact"] = adaptive.exact;
    }
  }
  artifacts.report_json = report.dump(2) + "\n";
  return artifacts;
}

}  // namespace oco
