#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dtdrift {

using Label = std::uint32_t;

struct Instance {
  std::vector<double> features;
  Label label = 0;

  bool operator==(const Instance&) const = default;
};

struct Chunk {
  std::size_t index = 0;
  std::vector<Instance> instances;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }
  std::size_t dimension() const noexcept {
    return instances.empty() ? 0 : instances.front().features.size();
  }

  bool operator==(const Chunk&) const = default;
};

using Stream = std::vector<Chunk>;

enum class GeneratorKind { kSea, kSine, kMixed, kCsv };

std::string_view to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view name);

struct StreamConfig {
  GeneratorKind generator = GeneratorKind::kSea;
  std::uint64_t seed = 0;
  std::size_t n_chunks = 100;
  std::size_t chunk_size = 1000;
  std::size_t drift_period = 10;
  double noise = 0.0;  // SEA label-flip probability
  // CSV only.
  std::filesystem::path csv_path;
  bool csv_header = false;

  std::size_t total_length() const noexcept { return n_chunks * chunk_size; }

  // Throws ConfigError for zero sizes or noise outside [0, 0.5].
  void validate() const;
};

// SEA concept thresholds, cycled every drift_period chunks.
inline constexpr double kSeaThresholds[] = {8.0, 9.0, 7.0, 9.5};

// Index of the concept active for a chunk: chunk_index / drift_period.
std::size_t concept_index(std::size_t chunk_index, std::size_t drift_period) noexcept;

// Noiseless labeling rules. Exposed so tests and the theory module can label
// points without drawing a stream.
Label sea_label(double f1, double f2, double concept_threshold) noexcept;
Label sine_label(double x1, double x2, bool reversed) noexcept;
Label mixed_label(bool v, bool w, double x, double y, bool reversed) noexcept;

Stream gen_sea(const StreamConfig& config);
Stream gen_sine(const StreamConfig& config);
Stream gen_mixed(const StreamConfig& config);

// One chunk of a built-in generator. Chunk content depends only on
// (config, chunk_index), never on which other chunks were generated.
Chunk generate_chunk(const StreamConfig& config, std::size_t chunk_index);

// Reads a comma-separated file whose last column is an integer label.
// Throws IngestionError naming the offending line.
Stream load_csv(const std::filesystem::path& path, std::size_t chunk_size,
                bool has_header = false);

// Parses CSV text already in memory; same contract as load_csv.
Stream parse_csv(std::string_view text, std::size_t chunk_size, bool has_header = false);

// Dispatches on config.generator.
Stream make_stream(const StreamConfig& config);

}  // namespace dtdrift
