#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oco/checks.hpp"
#include "oco/config.hpp"
#include "oco/sweep.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const oco::ExperimentConfig cfg = oco::load_config(config_path);
  const oco::RunArtifacts artifacts = oco::run_single(cfg);
  std::filesystem::create_directories(out_dir);
  write_file(std::filesystem::path(out_dir) / "transcript.csv",
             artifacts.transcript_csv);
  write_file(std::filesystem::path(out_dir) / "report.json",
             artifacts.report_json);
  std::cout << "wrote " << out_dir << "/transcript.csv and " << out_dir
            << "/report.json\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int jobs) {
  const oco::ExperimentConfig cfg = oco::load_config(config_path);
  const oco::SweepResult result = oco::run_sweep(cfg, jobs);
  std::filesystem::create_directories(out_dir);
  write_file(std::filesystem::path(out_dir) / "sweep.csv",
             oco::sweep_csv(result));
  write_file(std::filesystem::path(out_dir) / "sweep.json",
             oco::sweep_json(cfg, result));
  std::cout << "wrote " << out_dir << "/sweep.csv and " << out_dir
            << "/sweep.json (" << result.rows.size() << " rows)\n";
  if (!result.failures.empty()) {
    for (const auto& f : result.failures)
      std::cerr << "cell T=" << f.horizon << " seed=" << f.seed
                << " failed: " << f.error << "\n";
    return 1;
  }
  return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

int cmd_fit_slope(const std::string& in_path, const std::string& col,
                  const std::string& kind) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  auto find_col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int t_col = find_col("T");
  const int v_col = find_col(col);
  const int kind_col = find_col("regret_kind");
  if (t_col < 0) throw std::runtime_error("CSV has no T column");
  if (v_col < 0) throw std::runtime_error("CSV has no column named " + col);
  if (!kind.empty() && kind_col < 0)
    throw std::runtime_error("--kind given but CSV has no regret_kind column");

  std::map<double, std::pair<double, int>> by_t;  // T -> (sum, count)
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() <= static_cast<std::size_t>(std::max(t_col, v_col)))
      throw std::runtime_error("short CSV row: " + line);
    if (!kind.empty() &&
        fields[static_cast<std::size_t>(kind_col)] != kind)
      continue;
    const double t = std::stod(fields[static_cast<std::size_t>(t_col)]);
    const double v = std::stod(fields[static_cast<std::size_t>(v_col)]);
    auto& slot = by_t[t];
    slot.first += v;
    slot.second += 1;
  }
  std::vector<std::pair<double, double>> points;
  for (const auto& [t, sum_count] : by_t)
    points.emplace_back(t, sum_count.first / sum_count.second);

  const oco::SlopeFitOutcome outcome = oco::fit_log2_slope(points);
  if (!outcome.fit) {
    std::cerr << "fit refused: " << outcome.diagnostic << "\n";
    return 1;
  }
  nlohmann::json j = {{"slope", outcome.fit->slope},
                      {"intercept", outcome.fit->intercept},
                      {"r2", outcome.fit->r2}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_check(const std::string& suite, double alpha, double delta) {
  // alpha/delta reach the membership suite so a bad pairing (probe radius
  // above the shrink amount) is demonstrably caught rather than silently fine
  const std::vector<oco::CheckResult> results =
      suite == "membership"
          ? std::vector<oco::CheckResult>{oco::check_membership(12, alpha,
                                                                delta)}
          : suite.empty()
                ? oco::run_all_checks()
                : std::vector<oco::CheckResult>{oco::run_check(suite)};
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.name << ": " << r.detail
              << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online convex optimization experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_path, col, kind, suite;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "play one game, write transcript and report");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run every (T, seed) cell, write CSV and aggregates");
  sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "concurrent cells")->check(CLI::PositiveNumber);

  CLI::App* fit = app.add_subcommand("fit-slope", "least-squares slope in log2-log2 space");
  fit->add_option("--in", in_path, "input CSV")->required();
  fit->add_option("--col", col, "value column name")->required();
  fit->add_option("--kind", kind, "filter rows by regret_kind");

  CLI::App* check = app.add_subcommand("check", "run built-in invariant suites");
  check->add_option("--suite", suite, "run a single named suite");
  double check_alpha = 0.2, check_delta = 0.2;
  check->add_option("--alpha", check_alpha, "membership suite: shrink amount");
  check->add_option("--delta", check_delta, "membership suite: probe radius");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, jobs);
    if (fit->parsed()) return cmd_fit_slope(in_path, col, kind);
    if (check->parsed()) return cmd_check(suite, check_alpha, check_delta);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const oco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
