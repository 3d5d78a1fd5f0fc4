#include "dtdrift/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dtdrift/error.hpp"

namespace dtdrift {

std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kDdm:
      return "DDM";
    case DetectorKind::kPageHinkley:
      return "PH";
    case DetectorKind::kKswin:
      return "KSWIN";
    case DetectorKind::kHddmA:
      return "HDDM_A";
    case DetectorKind::kHddmW:
      return "HDDM_W";
  }
  return "unknown";
}

DetectorKind parse_detector_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(upper.begin(), upper.end(), '-', '_');
  if (upper == "DDM") return DetectorKind::kDdm;
  if (upper == "PH" || upper == "PAGE_HINKLEY") return DetectorKind::kPageHinkley;
  if (upper == "KSWIN") return DetectorKind::kKswin;
  if (upper == "HDDM_A") return DetectorKind::kHddmA;
  if (upper == "HDDM_W") return DetectorKind::kHddmW;
  throw ConfigError("unknown detector kind '" + std::string(name) + "'");
}

double DetectorParams::default_threshold(DetectorKind kind) const {
  switch (kind) {
    case DetectorKind::kDdm:
      return ddm_threshold;
    case DetectorKind::kPageHinkley:
      return ph_threshold;
    case DetectorKind::kKswin:
      return std::sqrt(-std::log(kswin_alpha) / static_cast<double>(kswin_recent));
    case DetectorKind::kHddmA:
      return hddm_a_threshold;
    case DetectorKind::kHddmW:
      return hddm_w_threshold;
  }
  return 0.0;
}

void DetectorParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("detector parameter '") + name + "' must be positive");
    }
  };
  if (ddm_min_samples == 0) throw ConfigError("ddm_min_samples must be positive");
  positive(ddm_threshold, "ddm_threshold");
  positive(ph_delta, "ph_delta");
  positive(ph_threshold, "ph_threshold");
  if (kswin_window == 0 || kswin_recent == 0) throw ConfigError("kswin sizes must be positive");
  if (kswin_recent >= kswin_window) throw ConfigError("kswin_recent must be below kswin_window");
  if (2 * kswin_recent > kswin_window) {
    throw ConfigError("kswin_window must hold at least 2 * kswin_recent values");
  }
  positive(kswin_alpha, "kswin_alpha");
  if (kswin_alpha >= 1.0) throw ConfigError("kswin_alpha must be below 1");
  positive(hddm_a_alpha, "hddm_a_alpha");
  if (hddm_a_alpha >= 1.0) throw ConfigError("hddm_a_alpha must be below 1");
  positive(hddm_a_threshold, "hddm_a_threshold");
  positive(hddm_w_lambda, "hddm_w_lambda");
  if (hddm_w_lambda >= 1.0) throw ConfigError("hddm_w_lambda must be below 1");
  positive(hddm_w_alpha, "hddm_w_alpha");
  if (hddm_w_alpha >= 1.0) throw ConfigError("hddm_w_alpha must be below 1");
  positive(hddm_w_threshold, "hddm_w_threshold");
}

namespace detail {

double DdmState::update(double x, double w) {
  ++updates;
  const double n = weight + w;
  mean += (x - mean) * (w / n);
  weight = n;
  const double s = std::sqrt(mean * (1.0 - mean) / weight);
  if (updates < min_samples) return 0.0;
  if (s > 0.0 && (!has_min || mean + s < p_min + s_min)) {
    p_min = mean;
    s_min = s;
    has_min = true;
  }
  if (!has_min || s_min <= 0.0) return 0.0;
  return std::max(0.0, (mean + s - (p_min + s_min)) / s_min);
}

double PageHinkleyState::update(double x) {
  ++count;
  mean += (x - mean) / static_cast<double>(count);
  cumulative += x - mean - delta;
  minimum = count == 1 ? cumulative : std::min(minimum, cumulative);
  return cumulative - minimum;
}

double KswinState::update(double x) {
  window.push_back(x);
  if (window.size() > window_size) window.pop_front();
  if (window.size() < window_size) return 0.0;

  const std::size_t older = window_size - recent;
  // Partial Fisher-Yates over the older part picks `recent` distinct slots.
  std::vector<std::size_t> idx(older);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> sample;
  sample.reserve(recent);
  for (std::size_t i = 0; i < recent; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(older - i));
    std::swap(idx[i], idx[j]);
    sample.push_back(window[idx[i]]);
  }
  std::vector<double> latest(window.end() - static_cast<std::ptrdiff_t>(recent), window.end());
  return ks_distance(std::move(latest), std::move(sample));
}

double HddmAState::update(double x, double w) {
  total_weight += w;
  total_sum += x * w;
  const double log_term = std::log(1.0 / alpha);
  const double score = total_sum / total_weight + std::sqrt(log_term / (2.0 * total_weight));
  if (!has_cut || score < cut_score) {
    cut_weight = total_weight;
    cut_sum = total_sum;
    cut_score = score;
    has_cut = true;
  }
  const double n1 = cut_weight;
  const double n2 = total_weight - cut_weight;
  if (n1 <= 0.0 || n2 <= 0.0) return 0.0;
  const double mu1 = cut_sum / n1;
  const double mu2 = (total_sum - cut_sum) / n2;
  const double eps = std::sqrt(log_term / 2.0 * (1.0 / n1 + 1.0 / n2));
  return std::max(0.0, (mu2 - mu1) / eps);
}

double HddmWState::update(double x, double w) {
  if (!started) {
    ewma = x;
    ewma_min = x;
    started = true;
  } else {
    const double keep = std::pow(1.0 - lambda, w);
    ewma = keep * ewma + (1.0 - keep) * x;
    ewma_min = std::min(ewma_min, ewma);
  }
  const double eps = std::sqrt(lambda / (2.0 - lambda) * std::log(1.0 / alpha) / 2.0);
  return std::max(0.0, (ewma - ewma_min) / eps);
}

}  // namespace detail

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

DriftMonitor::DriftMonitor(DetectorKind kind, const DetectorParams& params, double threshold)
    : kind_(kind), params_(params), state_(initial_state(kind, params)), threshold_(threshold) {}

DriftMonitor::State DriftMonitor::initial_state(DetectorKind kind, const DetectorParams& p) {
  switch (kind) {
    case DetectorKind::kDdm:
      return detail::DdmState{.min_samples = p.ddm_min_samples};
    case DetectorKind::kPageHinkley:
      return detail::PageHinkleyState{.delta = p.ph_delta};
    case DetectorKind::kKswin: {
      detail::KswinState s;
      s.window_size = p.kswin_window;
      s.recent = p.kswin_recent;
      s.rng = Rng(derive_seed(p.kswin_seed, 0x4B5357494EULL));
      return s;
    }
    case DetectorKind::kHddmA:
      return detail::HddmAState{.alpha = p.hddm_a_alpha};
    case DetectorKind::kHddmW:
      return detail::HddmWState{.lambda = p.hddm_w_lambda, .alpha = p.hddm_w_alpha};
  }
  throw ConfigError("unhandled detector kind");
}

DriftMonitor DriftMonitor::make(DetectorKind kind, const DetectorParams& params) {
  return make(kind, params, params.default_threshold(kind));
}

DriftMonitor DriftMonitor::make(DetectorKind kind, const DetectorParams& params,
                                double threshold) {
  params.validate();
  if (std::isnan(threshold)) throw InputError("threshold must not be NaN");
  return DriftMonitor(kind, params, threshold);
}

double DriftMonitor::update(double error_rate, double weight) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw InputError("error rate must lie in [0, 1], got " + std::to_string(error_rate));
  }
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InputError("update weight must be positive and finite");
  }
  ++updates_;
  statistic_ = std::visit(
      [&](auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, detail::PageHinkleyState> ||
                      std::is_same_v<T, detail::KswinState>) {
          return s.update(error_rate);
        } else {
          return s.update(error_rate, weight);
        }
      },
      state_);
  return statistic_;
}

void DriftMonitor::set_threshold(double threshold) {
  if (!std::isfinite(threshold)) throw InputError("threshold must be finite");
  threshold_ = threshold;
}

void DriftMonitor::reset() {
  state_ = initial_state(kind_, params_);
  statistic_ = 0.0;
  updates_ = 0;
}

DriftMonitor DriftMonitor::fresh(double threshold) const {
  if (std::isnan(threshold)) throw InputError("threshold must not be NaN");
  return DriftMonitor(kind_, params_, threshold);
}

}  // namespace dtdrift
