#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtdrift/classifier.hpp"
#include "dtdrift/detectors.hpp"
#include "dtdrift/dtd.hpp"
#include "dtdrift/stream.hpp"

namespace dtdrift {

enum class Method { kBaseline, kDtd };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kDdm;
  DetectorParams params;
  std::optional<double> threshold;  // overrides params' default for `kind`

  double initial_threshold() const {
    return threshold ? *threshold : params.default_threshold(kind);
  }
};

struct ExperimentConfig {
  std::string name = "experiment";
  StreamConfig stream;
  DetectorConfig detector;
  std::string classifier = "gnb";
  TrainingMode mode = TrainingMode::kContinual;
  std::vector<Method> methods = {Method::kBaseline, Method::kDtd};
  std::size_t comparison_length = 3;  // K
  double eta = 1e-6;
  std::vector<std::uint64_t> seeds = default_seeds(20);
  std::filesystem::path output = "results";

  static std::vector<std::uint64_t> default_seeds(std::size_t n);

  // Throws ConfigError.
  void validate() const;
  DtdConfig dtd_config() const { return {comparison_length, eta, mode}; }
};

// JSON config file <-> ExperimentConfig. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

struct ChunkRecord {
  std::size_t chunk_index = 0;
  double accuracy = 0.0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool alarm = false;
  Phase phase = Phase::kNormal;
  std::optional<CandidateKind> winner;
  OpCounts cost;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<ChunkRecord> trace;  // one record per evaluated chunk

  double mean_accuracy() const;
  std::vector<std::size_t> alarm_chunks() const;
  std::vector<double> threshold_trajectory() const;
};

struct ExperimentResult {
  std::string name;
  Method method = Method::kBaseline;
  std::vector<SeedResult> seeds;

  // Mean over seeds of per-seed mean accuracy, as a fraction.
  double mean_accuracy() const;
  // Population standard deviation of per-seed means.
  double stddev_accuracy() const;
};

// Per-chunk threshold schedule for the static-threshold loop. The default
// schedule returns the detector's configured threshold for every chunk.
using ThresholdSchedule = std::function<double(std::size_t chunk_index)>;

// Prequential loop with a static (or externally scheduled) threshold:
// train on chunk 0, then for every later chunk evaluate; on alarm adapt and
// reset the detector history, otherwise train in continual mode.
SeedResult run_baseline_stream(const Stream& stream, DriftMonitor detector, TrainingMode mode,
                               const ThresholdSchedule& schedule = {});

// Same warm-up, then DtdState::step per chunk.
SeedResult run_dtd_stream(const Stream& stream, DriftMonitor detector, const DtdConfig& config);

// Stream and detector for one seed. Baseline and DTD runs of the same
// (config, seed) get identical streams and detector seeds.
Stream stream_for_seed(const ExperimentConfig& config, std::uint64_t seed);
DriftMonitor detector_for_seed(const ExperimentConfig& config, std::uint64_t seed);

SeedResult run_seed(const ExperimentConfig& config, Method method, std::uint64_t seed);

// Runs every seed, `parallel` at a time (0 = hardware concurrency).
ExperimentResult run_baseline(const ExperimentConfig& config, std::size_t parallel = 1);
ExperimentResult run_dtd(const ExperimentConfig& config, std::size_t parallel = 1);
ExperimentResult run_method(const ExperimentConfig& config, Method method,
                            std::size_t parallel = 1);

// Runs `jobs` with at most `parallel` worker threads; the first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t jobs, std::size_t parallel,
                  const std::function<void(std::size_t)>& body);

// Seed trace as CSV: chunk_index,accuracy,statistic,threshold,alarm,phase
std::string trace_csv(const SeedResult& seed);

// Writes <dir>/seed<k>.csv for every seed and <dir>/summary.json.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

std::string experiment_summary_json(const ExperimentResult& result);

// Inverse of write_experiment. Throws ReportError on missing or malformed files.
ExperimentResult read_experiment(const std::filesystem::path& dir);

}  // namespace dtdrift
