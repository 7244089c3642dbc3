#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "oco/sweep.hpp"

using namespace oco;

namespace {

ExperimentConfig small_sweep_config() {
  return parse_config_text(R"({
    "domain": {"type": "ball", "center": [0, 0], "radius": 1.0},
    "adversary": {"type": "linear-random", "m1": 1.0},
    "agent": {"stack": [{"name": "ogd", "schedule": {"kind": "convex", "m1": 1.0}}]},
    "T_list": [256, 512, 1024, 2048],
    "seeds": 4,
    "master_seed": 11
  })");
}

}  // namespace

TEST_CASE("log-log slope fitting") {
  SUBCASE("exact half-power line") {
    const auto out =
        fit_log2_slope({{256.0, 16.0}, {1024.0, 32.0}, {4096.0, 64.0}});
    REQUIRE(out.fit.has_value());
    CHECK(out.fit->slope == doctest::Approx(0.5));
    CHECK(out.fit->r2 == doctest::Approx(1.0));
    CHECK(out.fit->intercept == doctest::Approx(0.0));  // log2 y = 0.5 log2 x
  }
  SUBCASE("exact three-quarter-power line") {
    const auto out = fit_log2_slope(
        {{256.0, 64.0}, {1024.0, std::pow(2.0, 7.5)}, {4096.0, 512.0}});
    REQUIRE(out.fit.has_value());
    CHECK(out.fit->slope == doctest::Approx(0.75));
    CHECK(out.fit->r2 == doctest::Approx(1.0));
  }
  SUBCASE("constant values fit slope zero") {
    const auto out =
        fit_log2_slope({{256.0, 7.0}, {1024.0, 7.0}, {4096.0, 7.0}});
    REQUIRE(out.fit.has_value());
    CHECK(out.fit->slope == doctest::Approx(0.0));
    CHECK(out.fit->r2 == doctest::Approx(1.0));  // flat line explains itself
  }
  SUBCASE("too few points are refused") {
    const auto out = fit_log2_slope({{256.0, 16.0}, {1024.0, 32.0}});
    CHECK_FALSE(out.fit.has_value());
    CHECK(out.diagnostic.find("at least 3") != std::string::npos);
  }
  SUBCASE("nonpositive ordinates are refused with a diagnostic") {
    const auto out =
        fit_log2_slope({{256.0, 16.0}, {1024.0, -2.0}, {4096.0, 64.0}});
    CHECK_FALSE(out.fit.has_value());
    CHECK(out.diagnostic.find("nonpositive mean regret") != std::string::npos);
    CHECK(out.diagnostic.find("refused") != std::string::npos);
  }
  SUBCASE("coincident abscissae are an error") {
    const auto out =
        fit_log2_slope({{256.0, 16.0}, {256.0, 18.0}, {256.0, 20.0}});
    CHECK_FALSE(out.fit.has_value());
    CHECK(out.diagnostic.find("degenerate") != std::string::npos);
  }
}

TEST_CASE("sweep produces one row per (horizon, seed, kind) cell") {
  const auto cfg = small_sweep_config();
  const auto result = run_sweep(cfg, 1);
  CHECK(result.failures.empty());
  REQUIRE(result.rows.size() == 16);  // 4 horizons x 4 seeds x 1 kind

  // rows are sorted by (kind, horizon, seed)
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    const auto& a = result.rows[i - 1];
    const auto& b = result.rows[i];
    CHECK(std::tie(a.kind, a.horizon, a.seed) <=
          std::tie(b.kind, b.horizon, b.seed));
  }
  for (const auto& row : result.rows) {
    CHECK(row.runtime_ms >= 0.0);
    CHECK(std::isfinite(row.value));
  }

  // aggregates match a direct computation from the rows
  REQUIRE(result.aggregates.size() == 4);
  for (const auto& agg : result.aggregates) {
    std::vector<double> values;
    for (const auto& row : result.rows)
      if (row.horizon == agg.horizon && row.kind == agg.kind)
        values.push_back(row.value);
    REQUIRE(static_cast<int>(values.size()) == agg.count);
    REQUIRE(agg.count == 4);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    CHECK(agg.mean == doctest::Approx(mean).epsilon(1e-12));
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (values.size() - 1);
    CHECK(agg.std_error ==
          doctest::Approx(std::sqrt(var / values.size())).epsilon(1e-12));
    // 0.9-quantile of four samples: the largest order statistic
    std::sort(values.begin(), values.end());
    CHECK(agg.q90 == doctest::Approx(values.back()));
  }

  // the static fit is present and reflects sublinear growth; four seeds is
  // too noisy for a tight window, so this only pins the sign and rough scale
  REQUIRE(result.fits.count("static") == 1);
  REQUIRE(result.fits.at("static").fit.has_value());
  const auto& fit = *result.fits.at("static").fit;
  CHECK(fit.slope > 0.05);
  CHECK(fit.slope < 0.9);
}

TEST_CASE("sweep results are independent of the job count") {
  const auto cfg = small_sweep_config();
  const auto a = run_sweep(cfg, 1);
  const auto b = run_sweep(cfg, 4);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].horizon == b.rows[i].horizon);
    CHECK(a.rows[i].seed == b.rows[i].seed);
    CHECK(a.rows[i].value == b.rows[i].value);  // bitwise
  }
}

TEST_CASE("sweep csv layout") {
  const auto cfg = small_sweep_config();
  const auto result = run_sweep(cfg, 2);
  const std::string csv = sweep_csv(result);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "T,seed,regret_kind,value,runtime_ms");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    CHECK(line.find("static") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 16);
}

TEST_CASE("sweep json carries aggregates, fits, and provenance") {
  auto cfg = small_sweep_config();
  const auto result = run_sweep(cfg, 2);
  const auto j = nlohmann::json::parse(sweep_json(cfg, result));
  CHECK(j.at("master_seed") == 11);
  CHECK(j.at("seeds") == 4);
  CHECK(j.at("horizons") == std::vector<int>{256, 512, 1024, 2048});
  const auto& kind = j.at("kinds").at("static");
  REQUIRE(kind.at("aggregates").size() == 4);
  const auto& first = kind.at("aggregates").at(0);
  CHECK(first.at("T") == 256);
  CHECK(first.at("count") == 4);
  CHECK(first.contains("mean"));
  CHECK(first.contains("std_error"));
  CHECK(first.contains("q90"));
  REQUIRE(kind.contains("slope_fit"));
  CHECK(kind.at("slope_fit").contains("slope"));
  CHECK(j.at("failures").empty());
}

TEST_CASE("failing cells are recorded and the sweep continues") {
  // dynamic regret needs a comparator path and the iid linear family has
  // none, so every (T, seed) cell aborts; each abort is recorded and the
  // sweep still visits all sixteen cells instead of stopping at the first.
  auto cfg = small_sweep_config();
  cfg.regret_kinds = {"static", "dynamic"};
  const auto result = run_sweep(cfg, 2);
  CHECK(result.rows.empty());  // an aborted cell contributes no rows
  REQUIRE(result.failures.size() == 16);
  std::set<std::pair<int, int>> cells;
  for (const auto& f : result.failures) {
    CHECK(f.error.find("comparator") != std::string::npos);
    cells.insert({f.horizon, f.seed});
  }
  CHECK(cells.size() == 16);  // every cell reported, none twice

  const auto j = nlohmann::json::parse(sweep_json(cfg, result));
  CHECK(j.at("failures").size() == 16);
}

TEST_CASE("fits degrade to diagnostics when a kind cannot be fitted") {
  // two horizons only: enough to sweep, too few to fit
  auto cfg = small_sweep_config();
  cfg.horizons = {256, 512};
  const auto result = run_sweep(cfg, 1);
  CHECK(result.rows.size() == 8);
  REQUIRE(result.fits.count("static") == 1);
  CHECK_FALSE(result.fits.at("static").fit.has_value());
  CHECK_FALSE(result.fits.at("static").diagnostic.empty());

  const auto j = nlohmann::json::parse(sweep_json(cfg, result));
  CHECK(j.at("kinds").at("static").at("slope_fit").is_null());
  CHECK(j.at("kinds").at("static").contains("slope_diagnostic"));
}

TEST_CASE("single runs render a transcript and a regret report") {
  auto cfg = parse_config_text(R"({
    "domain": {"type": "ball", "center": [0, 0], "radius": 1.0},
    "adversary": {"type": "quadratic-drift", "mu": 1.0, "path_length": 1.0},
    "agent": {"stack": [{"name": "ogd",
                         "schedule": {"kind": "strongly-convex", "mu": 1.0}}]},
    "T": 64,
    "seeds": 1,
    "master_seed": 3,
    "regret": ["static", "dynamic", "adaptive"]
  })");
  const auto artifacts = run_single(cfg);

  std::istringstream in(artifacts.transcript_csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,x0,x1,true_loss");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 64);

  const auto j = nlohmann::json::parse(artifacts.report_json);
  CHECK(j.at("T") == 64);
  CHECK(j.contains("static_regret"));
  CHECK(j.contains("dynamic_regret"));
  CHECK(j.contains("adaptive_regret"));
  CHECK(j.contains("comparator"));
  CHECK(j.at("slope_fit").is_null());     // needs a sweep over several T
  CHECK(j.at("quantile_p90").is_null());  // needs several seeds
  CHECK(j.at("static_regret").is_number());
  CHECK(j.at("dynamic_regret").is_number());
  CHECK(j.at("adaptive_regret").is_number());

  // a multi-horizon config cannot be a single run
  auto multi = small_sweep_config();
  CHECK_THROWS_AS(run_single(multi), ConfigError);
}
