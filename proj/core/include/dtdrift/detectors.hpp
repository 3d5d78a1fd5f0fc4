#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string_view>
#include <variant>
#include <vector>

#include "dtdrift/rng.hpp"

namespace dtdrift {

enum class DetectorKind { kDdm, kPageHinkley, kKswin, kHddmA, kHddmW };

inline constexpr DetectorKind kAllDetectorKinds[] = {
    DetectorKind::kDdm, DetectorKind::kPageHinkley, DetectorKind::kKswin,
    DetectorKind::kHddmA, DetectorKind::kHddmW};

std::string_view to_string(DetectorKind kind);
DetectorKind parse_detector_kind(std::string_view name);

struct DetectorParams {
  // DDM
  std::size_t ddm_min_samples = 2;
  double ddm_threshold = 3.0;
  // Page-Hinkley
  double ph_delta = 0.005;
  double ph_threshold = 0.1;
  // KSWIN; default threshold is sqrt(-ln(alpha) / recent).
  std::size_t kswin_window = 100;
  std::size_t kswin_recent = 30;
  double kswin_alpha = 0.005;
  std::uint64_t kswin_seed = 0;
  // HDDM-A
  double hddm_a_alpha = 0.001;
  double hddm_a_threshold = 1.0;
  // HDDM-W
  double hddm_w_lambda = 0.05;
  double hddm_w_alpha = 0.005;
  double hddm_w_threshold = 1.0;

  double default_threshold(DetectorKind kind) const;
  // Throws ConfigError when a parameter is non-positive or recent >= window.
  void validate() const;

  bool operator==(const DetectorParams&) const = default;
};

namespace detail {

struct DdmState {
  std::size_t min_samples = 2;
  std::size_t updates = 0;
  double weight = 0.0;  // n, in observations
  double mean = 0.0;    // running error rate p
  double p_min = 0.0;
  double s_min = 0.0;
  bool has_min = false;

  double update(double x, double w);
};

struct PageHinkleyState {
  double delta = 0.005;
  std::size_t count = 0;
  double mean = 0.0;
  double cumulative = 0.0;
  double minimum = 0.0;

  double update(double x);
};

struct KswinState {
  std::size_t window_size = 100;
  std::size_t recent = 30;
  std::deque<double> window;
  Rng rng{0};

  double update(double x);
};

struct HddmAState {
  double alpha = 0.001;
  double total_weight = 0.0;
  double total_sum = 0.0;
  double cut_weight = 0.0;
  double cut_sum = 0.0;
  double cut_score = 0.0;
  bool has_cut = false;

  double update(double x, double w);
};

struct HddmWState {
  double lambda = 0.05;
  double alpha = 0.005;
  bool started = false;
  double ewma = 0.0;
  double ewma_min = 0.0;

  double update(double x, double w);
};

}  // namespace detail

// A drift detector reduced to one contract: each update consumes one chunk
// error rate and produces a non-negative statistic; the detector is in alarm
// iff statistic() > threshold().
//
// `weight` is the number of observations the error rate summarizes (the chunk
// size). DDM and both HDDM variants scale their variance terms by it; PH and
// KSWIN treat every update as one observation. weight = 1 gives the plain
// per-value statistics.
class DriftMonitor {
 public:
  static DriftMonitor make(DetectorKind kind, const DetectorParams& params = {});
  // Accepts an infinite threshold (a detector that never alarms); NaN throws.
  static DriftMonitor make(DetectorKind kind, const DetectorParams& params, double threshold);

  DetectorKind kind() const noexcept { return kind_; }
  const DetectorParams& params() const noexcept { return params_; }

  // Throws InputError when error_rate is outside [0, 1] or weight <= 0.
  double update(double error_rate, double weight = 1.0);

  double statistic() const noexcept { return statistic_; }
  double threshold() const noexcept { return threshold_; }
  // Leaves history and statistic untouched. Throws InputError if not finite.
  void set_threshold(double threshold);
  bool alarm() const noexcept { return statistic_ > threshold_; }

  // Clears history; keeps the threshold. statistic() becomes 0.
  void reset();
  // Same kind and parameters with empty history and the given threshold.
  DriftMonitor fresh(double threshold) const;

  std::size_t updates() const noexcept { return updates_; }

 private:
  using State = std::variant<detail::DdmState, detail::PageHinkleyState, detail::KswinState,
                             detail::HddmAState, detail::HddmWState>;

  DriftMonitor(DetectorKind kind, const DetectorParams& params, double threshold);
  static State initial_state(DetectorKind kind, const DetectorParams& params);

  DetectorKind kind_;
  DetectorParams params_;
  State state_;
  double threshold_;
  double statistic_ = 0.0;
  std::size_t updates_ = 0;
};

// Two-sample Kolmogorov-Smirnov distance sup|F_a - F_b|. Inputs are copied.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace dtdrift
