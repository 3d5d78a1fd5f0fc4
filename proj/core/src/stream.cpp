#include "dtdrift/stream.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dtdrift/error.hpp"
#include "dtdrift/rng.hpp"

namespace dtdrift {

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kSea:
      return "sea";
    case GeneratorKind::kSine:
      return "sine";
    case GeneratorKind::kMixed:
      return "mixed";
    case GeneratorKind::kCsv:
      return "csv";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "sea" || name == "SEA") return GeneratorKind::kSea;
  if (name == "sine" || name == "Sine" || name == "SINE") return GeneratorKind::kSine;
  if (name == "mixed" || name == "Mixed" || name == "MIXED") return GeneratorKind::kMixed;
  if (name == "csv" || name == "CSV") return GeneratorKind::kCsv;
  throw ConfigError("unknown generator kind '" + std::string(name) + "'");
}

void StreamConfig::validate() const {
  if (chunk_size == 0) throw ConfigError("chunk_size must be positive");
  if (generator == GeneratorKind::kCsv) {
    if (csv_path.empty()) throw ConfigError("csv generator requires a path");
    return;
  }
  if (n_chunks == 0) throw ConfigError("n_chunks must be positive");
  if (drift_period == 0) throw ConfigError("drift_period must be positive");
  if (!(noise >= 0.0 && noise <= 0.5)) throw ConfigError("noise must lie in [0, 0.5]");
}

std::size_t concept_index(std::size_t chunk_index, std::size_t drift_period) noexcept {
  return chunk_index / drift_period;
}

Label sea_label(double f1, double f2, double concept_threshold) noexcept {
  return f1 + f2 <= concept_threshold ? 1 : 0;
}

Label sine_label(double x1, double x2, bool reversed) noexcept {
  const bool below = x2 < std::sin(x1);
  return (below != reversed) ? 1 : 0;
}

Label mixed_label(bool v, bool w, double x, double y, bool reversed) noexcept {
  const bool under_curve = y < 0.5 + 0.3 * std::sin(3.0 * std::numbers::pi * x);
  const int votes = int{v} + int{w} + int{under_curve};
  return ((votes >= 2) != reversed) ? 1 : 0;
}

namespace {

Chunk sea_chunk(const StreamConfig& config, std::size_t index) {
  Rng rng(derive_seed(config.seed, index));
  const auto n_concepts = std::size(kSeaThresholds);
  const double theta = kSeaThresholds[concept_index(index, config.drift_period) % n_concepts];
  Chunk chunk{index, {}};
  chunk.instances.reserve(config.chunk_size);
  for (std::size_t i = 0; i < config.chunk_size; ++i) {
    const double f1 = rng.uniform(0.0, 10.0);
    const double f2 = rng.uniform(0.0, 10.0);
    const double f3 = rng.uniform(0.0, 10.0);
    // Always consume the flip draw so features match across noise levels.
    const bool flip = rng.uniform() < config.noise;
    Label y = sea_label(f1, f2, theta);
    if (flip) y = 1 - y;
    chunk.instances.push_back({{f1, f2, f3}, y});
  }
  return chunk;
}

Chunk sine_chunk(const StreamConfig& config, std::size_t index) {
  Rng rng(derive_seed(config.seed, index));
  const bool reversed = concept_index(index, config.drift_period) % 2 == 1;
  Chunk chunk{index, {}};
  chunk.instances.reserve(config.chunk_size);
  for (std::size_t i = 0; i < config.chunk_size; ++i) {
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    chunk.instances.push_back({{x1, x2}, sine_label(x1, x2, reversed)});
  }
  return chunk;
}

Chunk mixed_chunk(const StreamConfig& config, std::size_t index) {
  Rng rng(derive_seed(config.seed, index));
  const bool reversed = concept_index(index, config.drift_period) % 2 == 1;
  Chunk chunk{index, {}};
  chunk.instances.reserve(config.chunk_size);
  for (std::size_t i = 0; i < config.chunk_size; ++i) {
    const bool v = rng.bernoulli(0.5);
    const bool w = rng.bernoulli(0.5);
    const double x = rng.uniform();
    const double y = rng.uniform();
    chunk.instances.push_back(
        {{v ? 1.0 : 0.0, w ? 1.0 : 0.0, x, y}, mixed_label(v, w, x, y, reversed)});
  }
  return chunk;
}

Stream generate_all(const StreamConfig& config, GeneratorKind expected) {
  if (config.generator != expected) {
    throw ConfigError("generator kind mismatch: config is '" +
                      std::string(to_string(config.generator)) + "'");
  }
  config.validate();
  Stream stream;
  stream.reserve(config.n_chunks);
  for (std::size_t t = 0; t < config.n_chunks; ++t) stream.push_back(generate_chunk(config, t));
  return stream;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Chunk generate_chunk(const StreamConfig& config, std::size_t chunk_index) {
  switch (config.generator) {
    case GeneratorKind::kSea:
      return sea_chunk(config, chunk_index);
    case GeneratorKind::kSine:
      return sine_chunk(config, chunk_index);
    case GeneratorKind::kMixed:
      return mixed_chunk(config, chunk_index);
    case GeneratorKind::kCsv:
      break;
  }
  throw ConfigError("generate_chunk: csv streams are not generated");
}

Stream gen_sea(const StreamConfig& config) { return generate_all(config, GeneratorKind::kSea); }
Stream gen_sine(const StreamConfig& config) { return generate_all(config, GeneratorKind::kSine); }
Stream gen_mixed(const StreamConfig& config) {
  return generate_all(config, GeneratorKind::kMixed);
}

Stream parse_csv(std::string_view text, std::size_t chunk_size, bool has_header) {
  if (chunk_size == 0) throw ConfigError("chunk_size must be positive");
  Stream stream;
  Chunk current{0, {}};
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    line = trim(line);
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::vector<std::string_view> cells;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      cells.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() < 2) {
      throw IngestionError("line " + std::to_string(line_no) + ": expected at least 2 columns",
                           line_no);
    }
    if (columns == 0) {
      columns = cells.size();
    } else if (cells.size() != columns) {
      throw IngestionError("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " columns, found " +
                               std::to_string(cells.size()),
                           line_no);
    }

    Instance inst;
    inst.features.reserve(columns - 1);
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      double v = 0.0;
      const auto cell = cells[c];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw IngestionError("line " + std::to_string(line_no) + ", column " +
                                 std::to_string(c + 1) + ": non-numeric cell '" +
                                 std::string(cell) + "'",
                             line_no);
      }
      inst.features.push_back(v);
    }
    const auto label_cell = cells.back();
    Label label = 0;
    const auto [ptr, ec] =
        std::from_chars(label_cell.data(), label_cell.data() + label_cell.size(), label);
    if (label_cell.empty() || ec != std::errc{} || ptr != label_cell.data() + label_cell.size()) {
      throw IngestionError("line " + std::to_string(line_no) +
                               ": label must be a non-negative integer, found '" +
                               std::string(label_cell) + "'",
                           line_no);
    }
    inst.label = label;

    current.instances.push_back(std::move(inst));
    if (current.instances.size() == chunk_size) {
      stream.push_back(std::move(current));
      current = Chunk{stream.size(), {}};
    }
  }
  if (!current.instances.empty()) stream.push_back(std::move(current));
  if (stream.empty()) throw IngestionError("no data rows found", 0);
  return stream;
}

Stream load_csv(const std::filesystem::path& path, std::size_t chunk_size, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path.string() + "'", 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), chunk_size, has_header);
}

Stream make_stream(const StreamConfig& config) {
  config.validate();
  switch (config.generator) {
    case GeneratorKind::kSea:
      return gen_sea(config);
    case GeneratorKind::kSine:
      return gen_sine(config);
    case GeneratorKind::kMixed:
      return gen_mixed(config);
    case GeneratorKind::kCsv:
      return load_csv(config.csv_path, config.chunk_size, config.csv_header);
  }
  throw ConfigError("unhandled generator kind");
}

}  // namespace dtdrift
