#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dtdrift/classifier.hpp"
#include "dtdrift/detectors.hpp"
#include "dtdrift/stream.hpp"

namespace dtdrift {

enum class TrainingMode { kContinual, kSporadic };

std::string_view to_string(TrainingMode mode);
TrainingMode parse_training_mode(std::string_view name);

// Candidate hypotheses raced after an alarm.
//   EDM: the drift was already visible one chunk earlier (winning sets theta <- S_{t-1}).
//   RDM: the alarm was on time (winning keeps theta).
//   PM:  the alarm was false (winning sets theta <- S_t + eta).
enum class CandidateKind : std::uint8_t { kEdm = 0, kRdm = 1, kPm = 2 };

inline constexpr std::array<CandidateKind, 3> kCandidateKinds = {
    CandidateKind::kEdm, CandidateKind::kRdm, CandidateKind::kPm};
// Tie-break order for leader and winner selection.
inline constexpr std::array<CandidateKind, 3> kCandidatePriority = {
    CandidateKind::kRdm, CandidateKind::kPm, CandidateKind::kEdm};

std::string_view to_string(CandidateKind kind);

struct Candidate {
  CandidateKind kind;
  GaussianNB model;
  DriftMonitor detector;
  std::vector<double> accuracy_log;
};

class CandidateSet {
 public:
  CandidateSet(Candidate edm, Candidate rdm, Candidate pm);

  Candidate& operator[](CandidateKind kind) { return slots_[index(kind)]; }
  const Candidate& operator[](CandidateKind kind) const { return slots_[index(kind)]; }

  auto begin() { return slots_.begin(); }
  auto end() { return slots_.end(); }
  auto begin() const { return slots_.begin(); }
  auto end() const { return slots_.end(); }

 private:
  static std::size_t index(CandidateKind kind) { return static_cast<std::size_t>(kind); }
  std::vector<Candidate> slots_;  // EDM, RDM, PM
};

// Per-candidate values in EDM, RDM, PM order.
using CandidateValues = std::array<double, 3>;

inline double at(const CandidateValues& v, CandidateKind kind) {
  return v[static_cast<std::size_t>(kind)];
}

// Highest value wins; ties resolved by kCandidatePriority.
CandidateKind argmax_with_priority(const CandidateValues& values);

struct CandidateInputs {
  const GaussianNB& model;           // M
  const GaussianNB& last_model;      // M', the snapshot before M's latest training
  const Chunk& current;              // C_t
  const Chunk* previous = nullptr;   // C_{t-1}; nullptr on the first chunk
  double accuracy = 0.0;             // a_t of M on C_t
  double statistic = 0.0;            // S_t, which just exceeded the threshold
  double previous_statistic = 0.0;   // S_{t-1}
  const DriftMonitor& detector;      // psi, already updated with C_t
};

// Builds the three candidates after an alarm. Throws StateError when there is
// no previous chunk.
CandidateSet create_candidates(const CandidateInputs& in, double eta, TrainingMode mode);

// Evaluates every candidate on `chunk`, appends to its log, then adapts it
// (alarm) or trains it (continual mode). Returns this chunk's accuracies.
CandidateValues eval_candidates(CandidateSet& candidates, const Chunk& chunk, TrainingMode mode);

struct Finalization {
  CandidateKind winner;
  CandidateValues mean_accuracy;
  GaussianNB model;
  DriftMonitor detector;
};

// Winner by mean of the full accuracy log. Throws StateError on an empty log.
Finalization finalize_comparison(const CandidateSet& candidates);

struct DtdConfig {
  std::size_t comparison_length = 3;  // K
  double eta = 1e-6;
  TrainingMode mode = TrainingMode::kContinual;

  void validate() const;
};

enum class Phase : std::uint8_t { kNormal, kComparison };
std::string_view to_string(Phase phase);

struct StepReport {
  double accuracy = 0.0;   // reported a_t
  double statistic = 0.0;  // primary S_t in the normal phase, leader's in comparison
  double threshold = 0.0;  // primary theta after the step
  bool alarm = false;      // primary detector alarmed on this chunk
  Phase phase = Phase::kNormal;  // phase the chunk was processed in
  std::optional<CandidateKind> winner;  // set on the chunk that closes a comparison
  OpCounts cost;  // model operations spent on this chunk
};

// Dynamic threshold state machine around one model and one detector.
class DtdState {
 public:
  // `model` must be fitted. `warmup` is the chunk the model was fitted on; it
  // serves as C_{t-1} if the first evaluated chunk alarms.
  DtdState(GaussianNB model, DriftMonitor detector, DtdConfig config,
           std::optional<Chunk> warmup = std::nullopt);

  StepReport step(const Chunk& chunk);

  const GaussianNB& model() const noexcept { return model_; }
  const GaussianNB& last_model() const noexcept { return last_model_; }
  const DriftMonitor& detector() const noexcept { return detector_; }
  DriftMonitor& detector() noexcept { return detector_; }
  double threshold() const noexcept { return detector_.threshold(); }
  const DtdConfig& config() const noexcept { return config_; }

  bool in_comparison() const noexcept { return candidates_.has_value(); }
  std::size_t countdown() const noexcept { return countdown_; }
  CandidateKind leader() const noexcept { return leader_; }
  const std::optional<CandidateSet>& candidates() const noexcept { return candidates_; }
  double previous_statistic() const noexcept { return previous_statistic_; }

 private:
  StepReport normal_step(const Chunk& chunk);
  StepReport comparison_step(const Chunk& chunk);

  DtdConfig config_;
  GaussianNB model_;
  GaussianNB last_model_;
  DriftMonitor detector_;
  std::optional<CandidateSet> candidates_;
  std::size_t countdown_ = 0;
  CandidateKind leader_ = CandidateKind::kRdm;
  double previous_statistic_ = 0.0;
  std::optional<Chunk> previous_chunk_;
};

}  // namespace dtdrift
