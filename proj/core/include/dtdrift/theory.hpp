#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtdrift/detectors.hpp"
#include "dtdrift/dtd.hpp"
#include "dtdrift/harness.hpp"
#include "dtdrift/stream.hpp"

namespace dtdrift::theory {

// Optional gradual-transition block for the sudden-drift formulas: the drift
// unfolds over `length` steps, scored at `accuracy` under perfect detection
// and at the mismatch accuracy under delayed detection.
struct GradualPhase {
  std::size_t length = 0;  // t_g
  double accuracy = 0.0;   // A_g
};

// One drift from C1 to C2, perfect versus delayed detection.
struct SuddenDriftParams {
  std::size_t total = 0;             // T
  std::size_t drift_at = 0;          // t_d
  std::size_t delay = 1;             // t_w
  std::size_t adapt_steps = 0;       // t_incre
  std::size_t adapt_steps_delayed = 0;  // t_incre'
  double acc_c1 = 0.0;               // A_C1
  double acc_mismatch = 0.0;         // A_dismatch
  double acc_adapt = 0.0;            // A_incre
  double acc_adapt_delayed = 0.0;    // A_incre'
  double acc_stable = 0.0;           // A_stable
  std::optional<GradualPhase> gradual;

  // Throws ParameterError.
  void validate() const;
};

// C2 appears for exactly one step, perfect versus missed detection.
struct RecurrentDriftParams {
  std::size_t total = 0;         // T
  std::size_t drift_at = 0;      // t_d
  std::size_t adapt_steps = 0;   // t_incre,1
  double acc_c1 = 0.0;           // A_C1
  double acc_mismatch = 0.0;     // A_dismatch
  double acc_mismatch2 = 0.0;    // A_mismatch2
  double acc_adapt = 0.0;        // A_incre,1
  double acc_stable = 0.0;       // A_stable,1

  void validate() const;
};

struct SuddenAccuracy {
  double perfect = 0.0;  // A_P
  double delayed = 0.0;  // A_D
};

struct RecurrentAccuracy {
  double perfect = 0.0;  // A_P
  double missed = 0.0;   // A_M
};

SuddenAccuracy analytic_sudden(const SuddenDriftParams& p);
RecurrentAccuracy analytic_recurrent(const RecurrentDriftParams& p);

// T * (A_D - A_P) expanded term by term; positive iff delayed detection wins.
double sudden_advantage(const SuddenDriftParams& p);

// Piecewise-constant threshold over chunk indices. Segment i covers
// [boundaries[i], boundaries[i+1]) and the last one runs to the end.
class ThresholdStrategy {
 public:
  static ThresholdStrategy constant(double threshold);
  // Throws ParameterError unless starts begin at 0 and strictly increase.
  static ThresholdStrategy piecewise(std::vector<std::pair<std::size_t, double>> segments);

  double at(std::size_t chunk_index) const;
  const std::vector<std::pair<std::size_t, double>>& segments() const { return segments_; }
  // Throws ParameterError when a segment starts at or beyond n_chunks.
  void check_covers(std::size_t n_chunks) const;

 private:
  std::vector<std::pair<std::size_t, double>> segments_;
};

struct PolicyOutcome {
  double accuracy = 0.0;  // mean over evaluated chunks
  SeedResult trace;
};

// Static-threshold prequential loop with theta looked up per chunk.
PolicyOutcome simulate_policy(const Stream& stream, const ThresholdStrategy& strategy,
                              DetectorKind kind, const DetectorParams& params, TrainingMode mode);

// Segment-separable accuracy model: accuracy[i][j] is the accuracy on
// segment i under grid threshold j, and segments contribute by length.
struct SeparableProblem {
  std::vector<double> thresholds;
  std::vector<std::size_t> segment_lengths;
  std::vector<std::vector<double>> accuracy;  // [segment][threshold]

  void validate() const;
};

struct Theorem3Report {
  double best_constant_threshold = 0.0;
  double best_constant_accuracy = 0.0;
  std::vector<double> segment_thresholds;  // per-segment optimum
  double dynamic_accuracy = 0.0;           // composed from per-segment optima
  double margin = 0.0;                     // dynamic - best constant
  // Simulation mode only: the composed strategy replayed end to end, with
  // model state carried across segments.
  std::optional<double> replay_accuracy;
  std::optional<double> replay_margin;
};

// Exact composition on the separable model. Ties pick the first grid entry.
Theorem3Report validate_theorem3(const SeparableProblem& problem);

// Simulation mode: every grid threshold runs the full stream; segment scores
// are the segment-restricted accuracies of those runs. `segment_starts` must
// begin at the first evaluated chunk's segment (0 allowed). Throws
// ParameterError on an empty grid.
Theorem3Report validate_theorem3(const Stream& stream, const std::vector<double>& grid,
                                 const std::vector<std::size_t>& segment_starts,
                                 DetectorKind kind, const DetectorParams& params,
                                 TrainingMode mode);

// Random separable problems for property checks.
SeparableProblem random_separable_problem(std::uint64_t seed);

// Single foreign chunk injected into a stationary SEA stream, run under
// oracle adaptation at both concept switches (perfect) and never adapting
// (missed). The analytic values use parameters measured from the runs.
struct RecurrentSimulation {
  RecurrentDriftParams matched;
  RecurrentAccuracy simulated;
  RecurrentAccuracy analytic;
};

struct RecurrentSimulationConfig {
  std::uint64_t seed = 0;
  std::size_t n_chunks = 100;
  std::size_t chunk_size = 1000;
  std::size_t foreign_chunk = 50;  // t_d + 1 in chunk units
  double base_threshold = 8.0;
  double foreign_threshold = 9.5;
};

RecurrentSimulation simulate_recurrent(const RecurrentSimulationConfig& config);

// SEA stream where chunk t is labeled with concept_thresholds[t].
Stream sea_stream_with_concepts(std::uint64_t seed, std::size_t n_chunks,
                                std::size_t chunk_size,
                                const std::vector<double>& concept_thresholds);

// All checks with pass/fail flags, as JSON.
std::string validation_report_json(std::uint64_t seed = 0);

}  // namespace dtdrift::theory
