#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dtdrift/detectors.hpp"
#include "dtdrift/stream.hpp"

namespace dtdrift {

// Per-class sufficient statistics: count, running mean and sum of squared
// deviations (Welford) per feature.
struct ClassStats {
  std::uint64_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  bool operator==(const ClassStats&) const = default;
};

// Incremental Gaussian Naive Bayes.
//
// Variances are floored at 1e-9 times the largest per-feature variance across
// classes (1.0 when all variances are zero). Prediction is argmax of
// log prior + sum of log Gaussian densities; ties go to the smaller label.
// Labels index a dense class table; labels never seen get prior 0.
class GaussianNB {
 public:
  static constexpr double kVarianceSmoothing = 1e-9;

  GaussianNB() = default;

  // Throws ModelError on a feature-dimension mismatch. An empty model adopts
  // the dimension of the first instance it sees.
  void train(std::span<const Instance> instances);
  void train(const Chunk& chunk) { train(std::span<const Instance>(chunk.instances)); }

  // Throws ModelError if the model is unfitted or the dimension differs.
  Label predict(std::span<const double> features) const;

  bool fitted() const noexcept { return total_ > 0; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  std::uint64_t total_count() const noexcept { return total_; }

  const ClassStats& class_stats(Label label) const;
  // Population variance of one feature for one class (unsmoothed).
  double variance(Label label, std::size_t feature) const;
  double mean(Label label, std::size_t feature) const;

  // Compares sufficient statistics only.
  bool operator==(const GaussianNB& other) const {
    return dimension_ == other.dimension_ && total_ == other.total_ &&
           classes_ == other.classes_;
  }

 private:
  void refresh_cache();

  std::size_t dimension_ = 0;
  std::uint64_t total_ = 0;
  std::vector<ClassStats> classes_;
  // Derived per-class terms used by predict.
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> inv_var_;
  std::vector<double> log_norm_;
};

// Instrumentation: per-thread counts of instance-level model operations.
struct OpCounts {
  std::uint64_t predictions = 0;
  std::uint64_t trained = 0;  // instances consumed by train or adapt

  std::uint64_t total() const noexcept { return predictions + trained; }
};

OpCounts& thread_op_counts() noexcept;

void train(GaussianNB& model, const Chunk& chunk);
Label predict(const GaussianNB& model, std::span<const double> features);

// Fresh model trained only on `chunk`; `model` does not influence the result.
// Throws ModelError on an empty chunk.
GaussianNB adapt(const GaussianNB& model, const Chunk& chunk);

struct EvalOutcome {
  double accuracy = 0.0;
  double statistic = 0.0;
};

// Test-then-train evaluation: scores the chunk with the model frozen, feeds
// the error rate (weighted by chunk size) to the detector once, and returns
// the accuracy with the detector's new statistic. Never trains the model.
EvalOutcome evaluate(const GaussianNB& model, const Chunk& chunk, DriftMonitor& detector);

// Fraction of the chunk predicted correctly.
double chunk_accuracy(const GaussianNB& model, const Chunk& chunk);

}  // namespace dtdrift
