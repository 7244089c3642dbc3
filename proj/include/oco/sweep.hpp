#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oco/config.hpp"

namespace oco {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// OLS of log2(y) on log2(x). Refuses nonpositive y, fewer than three points,
// or degenerate x with a diagnostic.
struct SlopeFitOutcome {
  std::optional<SlopeFit> fit;
  std::string diagnostic;
};
SlopeFitOutcome fit_log2_slope(const std::vector<std::pair<double, double>>& xy);

struct SweepRow {
  int horizon = 0;
  int seed = 0;
  std::string kind;
  double value = 0.0;
  double runtime_ms = 0.0;
};

struct SweepFailure {
  int horizon = 0;
  int seed = 0;
  std::string error;
};

struct SweepAggregate {
  int horizon = 0;
  std::string kind;
  int count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double q90 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;          // sorted by (kind, horizon, seed)
  std::vector<SweepFailure> failures;  // cells that threw
  std::vector<SweepAggregate> aggregates;
  std::map<std::string, SlopeFitOutcome> fits;  // per regret kind
};

// Runs every (horizon, seed) cell, jobs at a time. Cell streams derive from
// (master_seed, horizon, seed index) only, so results do not depend on the
// job count or scheduling.
SweepResult run_sweep(const ExperimentConfig& cfg, int jobs);

std::string sweep_csv(const SweepResult& result);
std::string sweep_json(const ExperimentConfig& cfg, const SweepResult& result);

struct RunArtifacts {
  std::string transcript_csv;
  std::string report_json;
};

// Executes the seed-0 cell of the first horizon and renders the transcript
// and the regret report.
RunArtifacts run_single(const ExperimentConfig& cfg);

}  // namespace oco
