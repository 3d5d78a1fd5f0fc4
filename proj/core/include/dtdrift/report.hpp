#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtdrift/harness.hpp"

namespace dtdrift {

struct MethodSummary {
  double mean = 0.0;    // percent
  double stddev = 0.0;  // percent, population over seeds
  std::size_t seeds = 0;
};

// One experiment name; baseline and/or DTD summaries, plus paired deltas when
// both are present.
struct CellSummary {
  std::string label;
  std::optional<MethodSummary> baseline;
  std::optional<MethodSummary> dtd;
  // dtd.mean - baseline.mean (percent); set only when both methods ran.
  std::optional<double> delta;
  std::size_t paired_wins = 0;    // seeds where DTD > baseline
  std::size_t paired_losses = 0;  // seeds where DTD < baseline
};

struct Report {
  std::vector<CellSummary> cells;
  std::size_t paired_cells = 0;
  std::size_t wins = 0;    // cells with DTD mean > baseline mean
  std::size_t losses = 0;  // cells with DTD mean < baseline mean
  std::size_t ties = 0;

  double win_rate() const;       // wins / paired_cells
  double non_loss_rate() const;  // (wins + ties) / paired_cells

  std::string to_json() const;
  std::string to_table() const;
};

// Groups results by name. Throws ReportError on an empty input, duplicate
// (name, method) pairs, or paired runs whose seeds or trace lengths differ.
Report summarize(std::span<const ExperimentResult> results);

}  // namespace dtdrift
