// dtdrift command line: run experiments, suites, reports and theory checks.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtdrift/error.hpp"
#include "dtdrift/harness.hpp"
#include "dtdrift/report.hpp"
#include "dtdrift/theory.hpp"

namespace fs = std::filesystem;
using namespace dtdrift;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
  std::optional<std::size_t> seeds;
  std::optional<std::string> method;
  std::size_t parallel = 1;
};

void apply(ExperimentConfig& c, const Overrides& o) {
  if (o.seeds) {
    if (*o.seeds == 0) throw ConfigError("--seeds must be positive");
    c.seeds = ExperimentConfig::default_seeds(*o.seeds);
  }
  if (o.method) c.methods = {parse_method(*o.method)};
  c.validate();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<ExperimentResult> run_all(const std::vector<ExperimentConfig>& configs,
                                      const fs::path& out, std::size_t parallel) {
  std::vector<ExperimentResult> results;
  for (const auto& c : configs) {
    for (Method m : c.methods) {
      results.push_back(run_method(c, m, parallel));
      write_experiment(results.back(), out / c.name / std::string(to_string(m)));
      std::cerr << c.name << " [" << to_string(m) << "] "
                << 100.0 * results.back().mean_accuracy() << "%\n";
    }
  }
  return results;
}

void finish(const std::vector<ExperimentResult>& results, const fs::path& out) {
  const Report report = summarize(results);
  write_text(out / "summary.json", report.to_json());
  std::cout << report.to_table();
}

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& out,
            const Overrides& o) {
  ExperimentConfig c = load_config(config_path);
  apply(c, o);
  const fs::path dir = out ? *out : c.output;
  finish(run_all({c}, dir, o.parallel), dir);
  return 0;
}

int cmd_suite(const fs::path& config_dir, const std::optional<fs::path>& out,
              const Overrides& o) {
  if (!fs::is_directory(config_dir)) {
    throw ConfigError("'" + config_dir.string() + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(config_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no *.json configs in '" + config_dir.string() + "'");

  std::vector<ExperimentConfig> configs;
  std::set<std::string> names;
  for (const auto& f : files) {
    ExperimentConfig c = load_config(f);
    apply(c, o);
    if (!names.insert(c.name).second) {
      throw ConfigError(f.string() + ": duplicate experiment name '" + c.name + "'");
    }
    configs.push_back(std::move(c));
  }
  const fs::path dir = out ? *out : fs::path("results");
  finish(run_all(configs, dir, o.parallel), dir);
  return 0;
}

int cmd_report(const fs::path& dir, bool json) {
  std::vector<fs::path> found;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().filename() == "summary.json" &&
          e.path().parent_path() != dir) {
        found.push_back(e.path().parent_path());
      }
    }
  }
  if (found.empty()) throw ConfigError("no stored results under '" + dir.string() + "'");
  std::sort(found.begin(), found.end());
  std::vector<ExperimentResult> results;
  for (const auto& d : found) results.push_back(read_experiment(d));
  const Report report = summarize(results);
  std::cout << (json ? report.to_json() : report.to_table());
  return 0;
}

int cmd_validate_theory(std::uint64_t seed, const std::optional<fs::path>& out) {
  const std::string report = theory::validation_report_json(seed);
  if (out) write_text(*out, report);
  std::cout << report;
  return report.find("\"all_pass\": true") != std::string::npos ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-drift experiments with dynamic detection thresholds"};
  app.require_subcommand(1);

  Overrides o;
  fs::path config;
  std::optional<fs::path> out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seeds", o.seeds, "Run seeds 0..N-1 instead of the configured list");
    sub->add_option("--parallel", o.parallel, "Worker threads (0 = all cores)");
    sub->add_option("--method", o.method, "Run only this method")
        ->check(CLI::IsMember({"baseline", "dtd"}));
  };

  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config, "Config file (JSON)")->required();
  add_common(run);

  auto* suite = app.add_subcommand("suite", "Run every *.json config in a directory");
  suite->add_option("--config", config, "Directory of config files")->required();
  add_common(suite);

  auto* report = app.add_subcommand("report", "Summarize stored results");
  fs::path results_dir = "results";
  bool as_json = false;
  report->add_option("--out,dir", results_dir, "Results directory written by run or suite");
  report->add_flag("--json", as_json, "Print JSON instead of a table");

  auto* theory_cmd = app.add_subcommand("validate-theory", "Run the analytic and simulated checks");
  std::uint64_t theory_seed = 0;
  std::optional<fs::path> theory_out;
  theory_cmd->add_option("--seed", theory_seed, "Seed for random draws and simulations");
  theory_cmd->add_option("--out", theory_out, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out, o);
    if (*suite) return cmd_suite(config, out, o);
    if (*report) return cmd_report(results_dir, as_json);
    if (*theory_cmd) return cmd_validate_theory(theory_seed, theory_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IngestionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
