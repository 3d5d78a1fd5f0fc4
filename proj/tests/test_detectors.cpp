#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dtdrift/detectors.hpp"
#include "dtdrift/error.hpp"
#include "dtdrift/rng.hpp"

using namespace dtdrift;

namespace {

std::vector<double> run(DriftMonitor& d, const std::vector<double>& xs, double w = 1.0) {
  std::vector<double> out;
  for (double x : xs) out.push_back(d.update(x, w));
  return out;
}

std::vector<double> repeat(double v, std::size_t n) { return std::vector<double>(n, v); }

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Recomputes the DDM statistic from scratch over the prefix xs[0..n).
double ddm_oracle(const std::vector<double>& xs, std::size_t n, std::size_t min_samples) {
  double best = std::numeric_limits<double>::infinity();
  double p_best = 0.0, s_best = 0.0;
  double p = 0.0, s = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += xs[i];
    p = sum / static_cast<double>(k);
    s = std::sqrt(p * (1 - p) / static_cast<double>(k));
    if (k >= min_samples && s > 0 && p + s < best) {
      best = p + s;
      p_best = p;
      s_best = s;
    }
  }
  if (n < min_samples || !(s_best > 0)) return 0.0;
  return std::max(0.0, (p + s - (p_best + s_best)) / s_best);
}

double ph_oracle(const std::vector<double>& xs, double delta) {
  std::vector<double> m;
  double acc = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    double mean = 0.0;
    for (std::size_t i = 0; i <= t; ++i) mean += xs[i];
    mean /= static_cast<double>(t + 1);
    acc += xs[t] - mean - delta;
    m.push_back(acc);
  }
  return m.back() - *std::min_element(m.begin(), m.end());
}

// Tries every prefix as the cut and keeps the one with the smallest bound.
double hddm_a_oracle(const std::vector<double>& xs, double alpha) {
  const double L = std::log(1 / alpha);
  const std::size_t n = xs.size();
  std::size_t cut = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= n; ++k) {
    double sum = 0;
    for (std::size_t i = 0; i < k; ++i) sum += xs[i];
    const double score = sum / k + std::sqrt(L / (2.0 * k));
    if (score < best) {
      best = score;
      cut = k;
    }
  }
  if (cut == n) return 0.0;
  double s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < cut; ++i) s1 += xs[i];
  for (std::size_t i = cut; i < n; ++i) s2 += xs[i];
  const double n1 = static_cast<double>(cut), n2 = static_cast<double>(n - cut);
  const double eps = std::sqrt(L / 2 * (1 / n1 + 1 / n2));
  return std::max(0.0, (s2 / n2 - s1 / n1) / eps);
}

// Brute-force KS: evaluate both empirical CDFs at every pooled point.
double ks_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y <= x; })) /
           static_cast<double>(v.size());
  };
  double d = 0;
  for (double x : concat(a, b)) d = std::max(d, std::abs(cdf(a, x) - cdf(b, x)));
  return d;
}

double binomial_rate(std::mt19937_64& g, double p) {
  std::binomial_distribution<int> b(1000, p);
  return b(g) / 1000.0;
}

}  // namespace

TEST(Ddm, ConstantZeroStaysQuiet) {
  auto d = DriftMonitor::make(DetectorKind::kDdm);
  for (double s : run(d, repeat(0.0, 200))) EXPECT_EQ(s, 0.0);
}

TEST(Ddm, FirstSampleIsZero) {
  auto d = DriftMonitor::make(DetectorKind::kDdm);
  EXPECT_EQ(d.update(0.4), 0.0);
}

TEST(Ddm, MatchesRecomputationAfterShift) {
  const auto xs = concat(repeat(0.1, 50), repeat(0.9, 20));
  auto d = DriftMonitor::make(DetectorKind::kDdm);
  const auto stats = run(d, xs);
  std::size_t oracle_cross = 0;
  for (std::size_t n = 1; n <= xs.size(); ++n) {
    const double expected = ddm_oracle(xs, n, 2);
    EXPECT_NEAR(stats[n - 1], expected, 1e-9 * std::max(1.0, expected)) << "n=" << n;
    if (oracle_cross == 0 && expected > 3.0) oracle_cross = n;
  }
  ASSERT_GT(oracle_cross, 50u);
  const auto it = std::find_if(stats.begin(), stats.end(), [](double s) { return s > 3.0; });
  EXPECT_EQ(static_cast<std::size_t>(it - stats.begin()) + 1, oracle_cross);
  // The unit-weight statistic needs more than five post-shift samples here.
  EXPECT_EQ(oracle_cross - 50, 9u);
}

TEST(Ddm, ResetThenStationaryDoesNotAlarm) {
  auto d = DriftMonitor::make(DetectorKind::kDdm);
  run(d, concat(repeat(0.1, 50), repeat(0.9, 20)));
  ASSERT_TRUE(d.alarm());
  d.reset();
  for (int i = 0; i < 150; ++i) {
    d.update(0.1);
    EXPECT_FALSE(d.alarm());
  }
}

TEST(Ddm, WeightActsLikeRepeatedObservationsForMean) {
  auto weighted = DriftMonitor::make(DetectorKind::kDdm);
  weighted.update(0.2, 1000);
  weighted.update(0.2, 1000);
  weighted.update(0.35, 1000);
  // z-like statistic with n counted in observations: shift of 0.05 in the
  // mean over 3000 observations is several standard errors.
  EXPECT_GT(weighted.statistic(), 3.0);
  auto unit = DriftMonitor::make(DetectorKind::kDdm);
  unit.update(0.2);
  unit.update(0.2);
  unit.update(0.35);
  EXPECT_LT(unit.statistic(), 1.0);
}

TEST(PageHinkley, ConstantInputIsZero) {
  auto d = DriftMonitor::make(DetectorKind::kPageHinkley);
  for (double s : run(d, repeat(0.37, 100))) EXPECT_EQ(s, 0.0);
}

TEST(PageHinkley, SingleSampleIsZero) {
  auto d = DriftMonitor::make(DetectorKind::kPageHinkley);
  EXPECT_EQ(d.update(0.9), 0.0);
}

TEST(PageHinkley, MatchesBruteForceCumulativeSum) {
  const auto xs = concat(repeat(0.1, 30), repeat(0.6, 10));
  auto d = DriftMonitor::make(DetectorKind::kPageHinkley);
  const auto stats = run(d, xs);
  for (std::size_t n = 1; n <= xs.size(); ++n) {
    const std::vector<double> prefix(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n));
    EXPECT_NEAR(stats[n - 1], ph_oracle(prefix, 0.005), 1e-12) << "n=" << n;
  }
  EXPECT_GT(stats.back(), 0.1);
}

TEST(PageHinkley, IgnoresWeight) {
  auto a = DriftMonitor::make(DetectorKind::kPageHinkley);
  auto b = DriftMonitor::make(DetectorKind::kPageHinkley);
  const auto xs = concat(repeat(0.2, 10), repeat(0.5, 5));
  EXPECT_EQ(run(a, xs, 1.0), run(b, xs, 1000.0));
}

TEST(Kswin, DefaultThreshold) {
  EXPECT_NEAR(DetectorParams{}.default_threshold(DetectorKind::kKswin),
              std::sqrt(-std::log(0.005) / 30.0), 1e-15);
  EXPECT_NEAR(DetectorParams{}.default_threshold(DetectorKind::kKswin), 0.4202, 1e-4);
}

TEST(Kswin, SilentUntilWindowFull) {
  auto d = DriftMonitor::make(DetectorKind::kKswin);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 99; ++i) EXPECT_EQ(d.update(u(g)), 0.0);
}

TEST(Kswin, IdenticalValuesGiveZero) {
  auto d = DriftMonitor::make(DetectorKind::kKswin);
  for (double s : run(d, repeat(0.25, 150))) EXPECT_EQ(s, 0.0);
}

TEST(Kswin, FullShiftOfRecentValues) {
  auto d = DriftMonitor::make(DetectorKind::kKswin);
  const auto stats = run(d, concat(repeat(0.1, 70), repeat(0.9, 30)));
  EXPECT_EQ(stats.back(), 1.0);
  EXPECT_TRUE(d.alarm());
}

TEST(Kswin, KsDistanceMatchesExhaustiveCdf) {
  std::mt19937_64 g(11);
  std::uniform_int_distribution<int> u(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(1 + trial % 17), b(1 + trial % 11);
    for (auto& x : a) x = u(g) / 10.0;
    for (auto& x : b) x = u(g) / 10.0;
    EXPECT_NEAR(ks_distance(a, b), ks_oracle(a, b), 1e-12);
  }
}

TEST(Kswin, SeededSubsampleIsReproducible) {
  DetectorParams p;
  p.kswin_seed = 42;
  auto a = DriftMonitor::make(DetectorKind::kKswin, p);
  auto b = DriftMonitor::make(DetectorKind::kKswin, p);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> xs(300);
  for (auto& x : xs) x = u(g);
  EXPECT_EQ(run(a, xs), run(b, xs));
}

TEST(HddmA, ConstantStreamIsZero) {
  auto d = DriftMonitor::make(DetectorKind::kHddmA);
  for (double s : run(d, repeat(0.3, 80))) EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(HddmA, CutAtEndIsZero) {
  // Decreasing inputs keep moving the best cut to the newest prefix.
  auto d = DriftMonitor::make(DetectorKind::kHddmA);
  for (double s : run(d, {0.9, 0.8, 0.7, 0.6})) EXPECT_EQ(s, 0.0);
}

TEST(HddmA, MatchesExhaustiveCutOracle) {
  const auto xs = concat(repeat(0.1, 50), repeat(0.6, 50));
  auto d = DriftMonitor::make(DetectorKind::kHddmA);
  const auto stats = run(d, xs);
  for (std::size_t n = 1; n <= xs.size(); n += 7) {
    const std::vector<double> prefix(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n));
    EXPECT_NEAR(stats[n - 1], hddm_a_oracle(prefix, 0.001), 1e-9) << "n=" << n;
  }
  EXPECT_NEAR(stats.back(), hddm_a_oracle(xs, 0.001), 1e-9);
  EXPECT_GT(stats.back(), 1.0);
}

TEST(HddmW, ConstantStreamIsZero) {
  auto d = DriftMonitor::make(DetectorKind::kHddmW);
  for (double s : run(d, repeat(0.4, 100))) EXPECT_EQ(s, 0.0);
}

TEST(HddmW, MonotoneDecreasingIsZero) {
  auto d = DriftMonitor::make(DetectorKind::kHddmW);
  std::vector<double> xs;
  for (int i = 0; i < 60; ++i) xs.push_back(0.9 - 0.01 * i);
  for (double s : run(d, xs)) EXPECT_EQ(s, 0.0);
}

TEST(HddmW, MatchesEwmaRecurrence) {
  const auto xs = concat(repeat(0.1, 100), repeat(0.7, 50));
  auto d = DriftMonitor::make(DetectorKind::kHddmW);
  const auto stats = run(d, xs);
  const double lambda = 0.05;
  const double eps = std::sqrt(lambda / (2 - lambda) * std::log(1 / 0.005) / 2);
  double z = xs[0], zmin = xs[0];
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (t > 0) z = lambda * xs[t] + (1 - lambda) * z;
    zmin = std::min(zmin, z);
    EXPECT_NEAR(stats[t], std::max(0.0, (z - zmin) / eps), 1e-12) << "t=" << t;
  }
  EXPECT_GT(stats.back(), 1.0);
}

TEST(HddmW, WeightCompoundsTheDecay) {
  auto a = DriftMonitor::make(DetectorKind::kHddmW);
  auto b = DriftMonitor::make(DetectorKind::kHddmW);
  a.update(0.1, 1.0);
  b.update(0.1, 1.0);
  a.update(0.5, 3.0);
  for (int i = 0; i < 3; ++i) b.update(0.5, 1.0);
  EXPECT_NEAR(a.statistic(), b.statistic(), 1e-12);
}

TEST(DriftMonitor, RejectsOutOfRangeInput) {
  for (auto kind : kAllDetectorKinds) {
    auto d = DriftMonitor::make(kind);
    EXPECT_THROW(d.update(-0.01), InputError);
    EXPECT_THROW(d.update(1.01), InputError);
    EXPECT_THROW(d.update(std::nan("")), InputError);
    EXPECT_THROW(d.update(0.5, 0.0), InputError);
  }
}

TEST(DriftMonitor, ThresholdAccessors) {
  for (auto kind : kAllDetectorKinds) {
    auto d = DriftMonitor::make(kind);
    d.update(0.2);
    d.update(0.3);
    const double before = d.statistic();
    d.set_threshold(0.123456789);
    EXPECT_EQ(d.threshold(), 0.123456789);
    EXPECT_EQ(d.statistic(), before);
    d.set_threshold(d.statistic() + 1e-6);
    EXPECT_FALSE(d.alarm());
    EXPECT_THROW(d.set_threshold(std::numeric_limits<double>::infinity()), InputError);
    EXPECT_THROW(d.set_threshold(std::nan("")), InputError);
  }
}

TEST(DriftMonitor, ResetKeepsThresholdAndActsFresh) {
  for (auto kind : kAllDetectorKinds) {
    auto d = DriftMonitor::make(kind);
    auto fresh = DriftMonitor::make(kind);
    d.set_threshold(0.77);
    fresh.set_threshold(0.77);
    run(d, concat(repeat(0.1, 120), repeat(0.8, 10)));
    d.reset();
    EXPECT_EQ(d.statistic(), 0.0);
    EXPECT_EQ(d.threshold(), 0.77);
    const auto xs = concat(repeat(0.2, 110), repeat(0.5, 10));
    EXPECT_EQ(run(d, xs), run(fresh, xs));
  }
}

TEST(DriftMonitor, CopiesAreIndependent) {
  for (auto kind : kAllDetectorKinds) {
    auto d = DriftMonitor::make(kind);
    run(d, repeat(0.2, 110));
    auto copy = d;
    const double before = d.statistic();
    run(copy, repeat(0.9, 20));
    EXPECT_EQ(d.statistic(), before);
    run(d, repeat(0.0, 10));
    EXPECT_NE(d.statistic(), copy.statistic());
  }
}

TEST(DriftMonitor, InfiniteThresholdNeverAlarms) {
  for (auto kind : kAllDetectorKinds) {
    auto d = DriftMonitor::make(kind, {}, std::numeric_limits<double>::infinity());
    for (int i = 0; i < 100; ++i) d.update(0.1);
    for (int i = 0; i < 50; ++i) {
      d.update(1.0);
      EXPECT_FALSE(d.alarm());
    }
  }
  EXPECT_THROW(DriftMonitor::make(DetectorKind::kDdm, {}, std::nan("")), InputError);
}

TEST(DriftMonitor, StatisticNonNegativeAndAlarmIsStrict) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto kind : kAllDetectorKinds) {
    auto d = DriftMonitor::make(kind);
    for (int i = 0; i < 500; ++i) {
      const double s = d.update(u(g), 1 + (i % 3) * 400.0);
      ASSERT_TRUE(std::isfinite(s));
      ASSERT_GE(s, 0.0);
      EXPECT_EQ(d.alarm(), s > d.threshold());
      d.set_threshold(s);
      EXPECT_FALSE(d.alarm());
      d.set_threshold(DetectorParams{}.default_threshold(kind));
    }
  }
}

TEST(DriftMonitor, RaisingThresholdNeverAddsAlarms) {
  std::mt19937_64 g(23);
  std::vector<double> xs;
  for (int i = 0; i < 300; ++i) xs.push_back(binomial_rate(g, i % 60 < 30 ? 0.2 : 0.45));
  for (auto kind : kAllDetectorKinds) {
    const double base = DetectorParams{}.default_threshold(kind);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      auto d = DriftMonitor::make(kind, {}, base * f);
      std::size_t alarms = 0;
      for (double x : xs) {
        d.update(x, 1000);
        alarms += d.alarm();
      }
      EXPECT_LE(alarms, prev) << to_string(kind) << " x" << f;
      prev = alarms;
    }
  }
}

TEST(DriftMonitor, KindNamesRoundTrip) {
  for (auto kind : kAllDetectorKinds) EXPECT_EQ(parse_detector_kind(to_string(kind)), kind);
  EXPECT_EQ(parse_detector_kind("hddm-a"), DetectorKind::kHddmA);
  EXPECT_THROW(parse_detector_kind("adwin"), ConfigError);
}

TEST(DetectorParams, Validation) {
  DetectorParams p;
  EXPECT_NO_THROW(p.validate());
  p.kswin_recent = 100;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.ph_delta = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.hddm_w_lambda = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
}
