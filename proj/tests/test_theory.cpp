#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <json.hpp>

#include "dtdrift/error.hpp"
#include "dtdrift/rng.hpp"
#include "dtdrift/theory.hpp"

using namespace dtdrift;
using namespace dtdrift::theory;

namespace {

SuddenDriftParams sudden_example() {
  SuddenDriftParams p;
  p.total = 100;
  p.drift_at = 40;
  p.acc_c1 = 0.9;
  p.acc_mismatch = 0.5;
  p.adapt_steps = 20;
  p.acc_adapt = 0.6;
  p.acc_stable = 0.9;
  p.delay = 3;
  p.adapt_steps_delayed = 5;
  p.acc_adapt_delayed = 0.8;
  return p;
}

RecurrentDriftParams recurrent_example() {
  RecurrentDriftParams p;
  p.total = 100;
  p.drift_at = 50;
  p.acc_c1 = 0.9;
  p.acc_stable = 0.9;
  p.acc_mismatch = 0.5;
  p.acc_mismatch2 = 0.5;
  p.adapt_steps = 10;
  p.acc_adapt = 0.6;
  return p;
}

// Step-by-step accuracy sequences summed and averaged; independent of the
// closed forms.
double average(const std::vector<double>& xs) {
  long double s = 0;
  for (double x : xs) s += x;
  return static_cast<double>(s / static_cast<long double>(xs.size()));
}

std::vector<double> sequence(std::initializer_list<std::pair<std::size_t, double>> blocks) {
  std::vector<double> out;
  for (const auto& [n, a] : blocks) out.insert(out.end(), n, a);
  return out;
}

}  // namespace

TEST(AnalyticSudden, MatchesStepSequences) {
  const auto p = sudden_example();
  const auto r = analytic_sudden(p);
  const double ap = average(sequence({{40, 0.9}, {1, 0.5}, {20, 0.6}, {39, 0.9}}));
  const double ad = average(sequence({{40, 0.9}, {3, 0.5}, {5, 0.8}, {52, 0.9}}));
  EXPECT_NEAR(r.perfect, ap, 1e-15);
  EXPECT_NEAR(r.delayed, ad, 1e-15);
  EXPECT_GT(r.delayed, r.perfect);
}

TEST(AnalyticSudden, DegenerateCases) {
  auto p = sudden_example();
  p.delay = 1;
  p.adapt_steps_delayed = p.adapt_steps;
  p.acc_adapt_delayed = p.acc_adapt;
  auto r = analytic_sudden(p);
  EXPECT_EQ(r.perfect, r.delayed);

  p = sudden_example();
  p.acc_c1 = p.acc_mismatch = p.acc_adapt = p.acc_adapt_delayed = p.acc_stable = 0.73;
  r = analytic_sudden(p);
  EXPECT_NEAR(r.perfect, 0.73, 1e-15);
  EXPECT_NEAR(r.delayed, 0.73, 1e-15);
}

TEST(AnalyticSudden, AdvantageIdentity) {
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    SuddenDriftParams p;
    p.total = 10 + rng.below(300);
    p.drift_at = rng.below(p.total / 2);
    const std::size_t room = p.total - p.drift_at;
    p.adapt_steps = rng.below(room - 1);
    p.delay = 1 + rng.below(room - 1);
    p.adapt_steps_delayed = rng.below(room - p.delay + 1);
    p.acc_c1 = rng.uniform();
    p.acc_mismatch = rng.uniform();
    p.acc_adapt = rng.uniform();
    p.acc_adapt_delayed = rng.uniform();
    p.acc_stable = rng.uniform();
    const auto r = analytic_sudden(p);
    const double lhs = sudden_advantage(p);
    ASSERT_NEAR(lhs, (r.delayed - r.perfect) * static_cast<double>(p.total), 1e-9);
    if (lhs > 1e-9) ASSERT_GT(r.delayed, r.perfect);
  }
}

TEST(AnalyticSudden, GradualExtension) {
  auto p = sudden_example();
  p.gradual = GradualPhase{5, 0.7};
  const auto r = analytic_sudden(p);
  const double ap = average(sequence({{40, 0.9}, {5, 0.7}, {20, 0.6}, {35, 0.9}}));
  const double ad = average(sequence({{40, 0.9}, {8, 0.5}, {5, 0.8}, {47, 0.9}}));
  EXPECT_NEAR(r.perfect, ap, 1e-15);
  EXPECT_NEAR(r.delayed, ad, 1e-15);
  EXPECT_NEAR(sudden_advantage(p), (r.delayed - r.perfect) * 100, 1e-12);
}

TEST(AnalyticSudden, Validation) {
  auto p = sudden_example();
  p.adapt_steps = 60;
  EXPECT_THROW(analytic_sudden(p), ParameterError);
  p = sudden_example();
  p.acc_stable = 1.2;
  EXPECT_THROW(analytic_sudden(p), ParameterError);
  p = sudden_example();
  p.delay = 0;
  EXPECT_THROW(analytic_sudden(p), ParameterError);
}

TEST(AnalyticRecurrent, MatchesStepSequences) {
  const auto p = recurrent_example();
  const auto r = analytic_recurrent(p);
  const double ap = average(sequence({{50, 0.9}, {1, 0.5}, {1, 0.5}, {10, 0.6}, {38, 0.9}}));
  const double am = average(sequence({{50, 0.9}, {1, 0.5}, {49, 0.9}}));
  EXPECT_NEAR(r.perfect, ap, 1e-15);
  EXPECT_NEAR(r.missed, am, 1e-15);
  EXPECT_GT(r.missed, r.perfect);
}

TEST(AnalyticRecurrent, NoPenaltyCases) {
  auto p = recurrent_example();
  p.acc_mismatch2 = p.acc_stable;
  p.acc_adapt = p.acc_stable;
  auto r = analytic_recurrent(p);
  EXPECT_NEAR(r.missed, r.perfect, 1e-15);
  p.adapt_steps = 0;
  r = analytic_recurrent(p);
  EXPECT_NEAR(r.missed, r.perfect, 1e-15);
  p.adapt_steps = 49;
  EXPECT_THROW(analytic_recurrent(p), ParameterError);
}

TEST(ThresholdStrategy, LookupAndValidation) {
  const auto s = ThresholdStrategy::piecewise({{0, 1.0}, {10, 2.0}, {25, 0.5}});
  EXPECT_EQ(s.at(0), 1.0);
  EXPECT_EQ(s.at(9), 1.0);
  EXPECT_EQ(s.at(10), 2.0);
  EXPECT_EQ(s.at(99), 0.5);
  EXPECT_NO_THROW(s.check_covers(26));
  EXPECT_THROW(s.check_covers(25), ParameterError);
  EXPECT_THROW(ThresholdStrategy::piecewise({}), ParameterError);
  EXPECT_THROW(ThresholdStrategy::piecewise({{1, 1.0}}), ParameterError);
  EXPECT_THROW(ThresholdStrategy::piecewise({{0, 1.0}, {5, 2.0}, {5, 3.0}}), ParameterError);
}

TEST(SimulatePolicy, ConstantEqualsBaseline) {
  StreamConfig sc;
  sc.n_chunks = 40;
  sc.chunk_size = 300;
  const Stream s = make_stream(sc);
  const auto policy = simulate_policy(s, ThresholdStrategy::constant(3.0), DetectorKind::kDdm, {},
                                      TrainingMode::kContinual);
  const auto base = run_baseline_stream(s, DriftMonitor::make(DetectorKind::kDdm),
                                        TrainingMode::kContinual);
  EXPECT_EQ(trace_csv(policy.trace), trace_csv(base));
  EXPECT_EQ(policy.accuracy, base.mean_accuracy());

  const auto never = simulate_policy(s, ThresholdStrategy::constant(
                                            std::numeric_limits<double>::infinity()),
                                     DetectorKind::kDdm, {}, TrainingMode::kContinual);
  EXPECT_TRUE(never.trace.alarm_chunks().empty());
}

TEST(SimulatePolicy, TwoSegmentGridOptimum) {
  std::vector<double> concepts(40, 8.0);
  for (std::size_t t = 20; t < 40; ++t) concepts[t] = 9.5;
  const Stream s = sea_stream_with_concepts(3, 40, 300, concepts);
  const std::vector<double> grid = {0.5, 2.0, 3.0, 8.0, 1e9};
  const auto r = validate_theorem3(s, grid, {0, 20}, DetectorKind::kDdm, {},
                                   TrainingMode::kContinual);
  // Exhaustive per-segment recomputation.
  double composed = 0;
  for (std::size_t seg = 0; seg < 2; ++seg) {
    double best = -1;
    for (double theta : grid) {
      const auto run = simulate_policy(s, ThresholdStrategy::constant(theta), DetectorKind::kDdm,
                                       {}, TrainingMode::kContinual);
      double sum = 0;
      for (const auto& rec : run.trace.trace) {
        if ((rec.chunk_index >= 20) == (seg == 1)) sum += rec.accuracy;
      }
      best = std::max(best, sum);
    }
    composed += best;
  }
  EXPECT_NEAR(r.dynamic_accuracy, composed / 39.0, 1e-12);
  EXPECT_GE(r.margin, -1e-12);
  EXPECT_TRUE(r.replay_accuracy.has_value());
}

TEST(Theorem3, SeparableExamples) {
  SeparableProblem p;
  p.thresholds = {1, 2, 3};
  p.segment_lengths = {10, 30};
  p.accuracy = {{0.9, 0.5, 0.4}, {0.6, 0.7, 0.8}};
  const auto r = validate_theorem3(p);
  EXPECT_EQ(r.best_constant_threshold, 3);
  EXPECT_NEAR(r.best_constant_accuracy, (10 * 0.4 + 30 * 0.8) / 40, 1e-15);
  EXPECT_NEAR(r.dynamic_accuracy, (10 * 0.9 + 30 * 0.8) / 40, 1e-15);
  EXPECT_EQ(r.segment_thresholds, (std::vector<double>{1, 3}));

  SeparableProblem single = p;
  single.thresholds = {2};
  single.accuracy = {{0.5}, {0.7}};
  EXPECT_EQ(validate_theorem3(single).margin, 0.0);

  SeparableProblem homogeneous = p;
  homogeneous.accuracy = {{0.6, 0.7, 0.65}, {0.6, 0.7, 0.65}};
  EXPECT_EQ(validate_theorem3(homogeneous).margin, 0.0);

  SeparableProblem bad = p;
  bad.thresholds.clear();
  EXPECT_THROW(validate_theorem3(bad), ParameterError);
}

TEST(Theorem3, RandomSeparableMarginsNonNegative) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = random_separable_problem(seed);
    const auto r = validate_theorem3(p);
    EXPECT_GE(r.margin, -1e-12);
    // Dynamic beats every constant, not only the best one.
    double total = 0;
    for (auto n : p.segment_lengths) total += static_cast<double>(n);
    for (std::size_t j = 0; j < p.thresholds.size(); ++j) {
      double acc = 0;
      for (std::size_t i = 0; i < p.segment_lengths.size(); ++i) {
        acc += static_cast<double>(p.segment_lengths[i]) * p.accuracy[i][j];
      }
      EXPECT_GE(r.dynamic_accuracy, acc / total - 1e-12);
    }
  }
}

TEST(Theorem3, SimulationRejectsEmptyGrid) {
  const Stream s = sea_stream_with_concepts(0, 5, 50, std::vector<double>(5, 8.0));
  EXPECT_THROW(validate_theorem3(s, {}, {0}, DetectorKind::kDdm, {}, TrainingMode::kContinual),
               ParameterError);
}

TEST(Recurrent, SimulationAgreesWithAnalytic) {
  const auto sim = simulate_recurrent({});
  EXPECT_GT(sim.analytic.missed, sim.analytic.perfect);
  EXPECT_EQ(sim.simulated.missed > sim.simulated.perfect,
            sim.analytic.missed > sim.analytic.perfect);
  EXPECT_LE(std::abs(sim.simulated.perfect - sim.analytic.perfect), 0.005);
  EXPECT_LE(std::abs(sim.simulated.missed - sim.analytic.missed), 0.005);
}

TEST(Recurrent, SeaConceptsRelabel) {
  const Stream s = sea_stream_with_concepts(1, 3, 100, {8.0, 9.5, 7.0});
  for (std::size_t t = 0; t < 3; ++t) {
    const double theta = t == 0 ? 8.0 : t == 1 ? 9.5 : 7.0;
    for (const auto& inst : s[t].instances) {
      ASSERT_EQ(inst.label, sea_label(inst.features[0], inst.features[1], theta));
    }
  }
  EXPECT_THROW(sea_stream_with_concepts(1, 3, 100, {8.0}), ParameterError);
}

TEST(ValidationReport, AllChecksPass) {
  const auto j = nlohmann::json::parse(validation_report_json(0));
  EXPECT_TRUE(j.at("all_pass").get<bool>());
  EXPECT_GE(j.at("checks").size(), 6u);
}
