#include "dtdrift/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dtdrift/error.hpp"

namespace dtdrift {

OpCounts& thread_op_counts() noexcept {
  thread_local OpCounts counts;
  return counts;
}

void GaussianNB::train(std::span<const Instance> instances) {
  if (instances.empty()) return;
  if (dimension_ == 0 && total_ == 0) dimension_ = instances.front().features.size();
  for (const auto& inst : instances) {
    if (inst.features.size() != dimension_) {
      throw ModelError("feature dimension mismatch: model has " + std::to_string(dimension_) +
                       ", instance has " + std::to_string(inst.features.size()));
    }
  }
  for (const auto& inst : instances) {
    if (inst.label >= classes_.size()) classes_.resize(inst.label + std::size_t{1});
    auto& cls = classes_[inst.label];
    if (cls.count == 0) {
      cls.mean.assign(dimension_, 0.0);
      cls.m2.assign(dimension_, 0.0);
    }
    ++cls.count;
    const double n = static_cast<double>(cls.count);
    for (std::size_t f = 0; f < dimension_; ++f) {
      const double delta = inst.features[f] - cls.mean[f];
      cls.mean[f] += delta / n;
      cls.m2[f] += delta * (inst.features[f] - cls.mean[f]);
    }
    ++total_;
  }
  thread_op_counts().trained += instances.size();
  refresh_cache();
}

void GaussianNB::refresh_cache() {
  double max_var = 0.0;
  for (const auto& cls : classes_) {
    if (cls.count == 0) continue;
    for (double m2 : cls.m2) max_var = std::max(max_var, m2 / static_cast<double>(cls.count));
  }
  const double floor = kVarianceSmoothing * (max_var > 0.0 ? max_var : 1.0);

  const std::size_t k = classes_.size();
  log_prior_.assign(k, -std::numeric_limits<double>::infinity());
  inv_var_.assign(k, {});
  log_norm_.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const auto& cls = classes_[c];
    if (cls.count == 0) continue;
    const double n = static_cast<double>(cls.count);
    log_prior_[c] = std::log(n / static_cast<double>(total_));
    inv_var_[c].resize(dimension_);
    double norm = 0.0;
    for (std::size_t f = 0; f < dimension_; ++f) {
      const double var = std::max(cls.m2[f] / n, floor);
      inv_var_[c][f] = 1.0 / var;
      norm += -0.5 * std::log(2.0 * std::numbers::pi * var);
    }
    log_norm_[c] = norm;
  }
}

Label GaussianNB::predict(std::span<const double> features) const {
  if (!fitted()) throw ModelError("predict called on an unfitted model");
  if (features.size() != dimension_) {
    throw ModelError("feature dimension mismatch: model has " + std::to_string(dimension_) +
                     ", query has " + std::to_string(features.size()));
  }
  ++thread_op_counts().predictions;
  Label best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const auto& cls = classes_[c];
    if (cls.count == 0) continue;
    double score = log_prior_[c] + log_norm_[c];
    for (std::size_t f = 0; f < dimension_; ++f) {
      const double d = features[f] - cls.mean[f];
      score -= 0.5 * d * d * inv_var_[c][f];
    }
    if (!found || score > best_score) {
      best = static_cast<Label>(c);
      best_score = score;
      found = true;
    }
  }
  return best;
}

const ClassStats& GaussianNB::class_stats(Label label) const {
  if (label >= classes_.size() || classes_[label].count == 0) {
    throw ModelError("class " + std::to_string(label) + " has no training data");
  }
  return classes_[label];
}

double GaussianNB::variance(Label label, std::size_t feature) const {
  const auto& cls = class_stats(label);
  return cls.m2.at(feature) / static_cast<double>(cls.count);
}

double GaussianNB::mean(Label label, std::size_t feature) const {
  return class_stats(label).mean.at(feature);
}

void train(GaussianNB& model, const Chunk& chunk) { model.train(chunk); }

Label predict(const GaussianNB& model, std::span<const double> features) {
  return model.predict(features);
}

GaussianNB adapt(const GaussianNB& /*model*/, const Chunk& chunk) {
  if (chunk.empty()) throw ModelError("adapt requires a non-empty chunk");
  GaussianNB fresh;
  fresh.train(chunk);
  return fresh;
}

double chunk_accuracy(const GaussianNB& model, const Chunk& chunk) {
  if (chunk.empty()) throw ModelError("cannot evaluate an empty chunk");
  std::size_t correct = 0;
  for (const auto& inst : chunk.instances) {
    if (model.predict(inst.features) == inst.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(chunk.size());
}

EvalOutcome evaluate(const GaussianNB& model, const Chunk& chunk, DriftMonitor& detector) {
  const double accuracy = chunk_accuracy(model, chunk);
  const double statistic =
      detector.update(1.0 - accuracy, static_cast<double>(chunk.size()));
  return {accuracy, statistic};
}

}  // namespace dtdrift
