#include "dtdrift/dtd.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dtdrift/error.hpp"

namespace dtdrift {

std::string_view to_string(TrainingMode mode) {
  return mode == TrainingMode::kContinual ? "continual" : "sporadic";
}

TrainingMode parse_training_mode(std::string_view name) {
  if (name == "continual") return TrainingMode::kContinual;
  if (name == "sporadic") return TrainingMode::kSporadic;
  throw ConfigError("unknown training mode '" + std::string(name) + "'");
}

std::string_view to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::kEdm:
      return "EDM";
    case CandidateKind::kRdm:
      return "RDM";
    case CandidateKind::kPm:
      return "PM";
  }
  return "unknown";
}

std::string_view to_string(Phase phase) {
  return phase == Phase::kNormal ? "normal" : "comparison";
}

CandidateSet::CandidateSet(Candidate edm, Candidate rdm, Candidate pm) {
  slots_.reserve(3);
  slots_.push_back(std::move(edm));
  slots_.push_back(std::move(rdm));
  slots_.push_back(std::move(pm));
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].kind != kCandidateKinds[i]) throw StateError("candidate slots out of order");
  }
}

CandidateKind argmax_with_priority(const CandidateValues& values) {
  CandidateKind best = kCandidatePriority.front();
  for (CandidateKind kind : kCandidatePriority) {
    if (at(values, kind) > at(values, best)) best = kind;
  }
  return best;
}

CandidateSet create_candidates(const CandidateInputs& in, double eta, TrainingMode mode) {
  if (in.previous == nullptr) {
    throw StateError("cannot create candidates without a previous chunk");
  }
  const bool continual = mode == TrainingMode::kContinual;

  // RDM: adapt now, keep the primary detector and its threshold.
  Candidate rdm{CandidateKind::kRdm, adapt(in.model, in.current), in.detector, {in.accuracy}};
  rdm.detector.reset();

  // EDM: adapt on the previous chunk, then replay the current one.
  Candidate edm{CandidateKind::kEdm, adapt(in.last_model, *in.previous),
                in.detector.fresh(in.previous_statistic), {}};
  const EvalOutcome replay = evaluate(edm.model, in.current, edm.detector);
  edm.accuracy_log.push_back(replay.accuracy);
  if (replay.statistic > in.previous_statistic) {
    edm.model = adapt(edm.model, in.current);
    edm.detector.reset();
  } else if (continual) {
    edm.model.train(in.current);
  }

  // PM: treat the alarm as false.
  Candidate pm{CandidateKind::kPm, in.model, in.detector.fresh(in.statistic + eta),
               {in.accuracy}};
  if (continual) pm.model.train(in.current);

  return CandidateSet(std::move(edm), std::move(rdm), std::move(pm));
}

CandidateValues eval_candidates(CandidateSet& candidates, const Chunk& chunk, TrainingMode mode) {
  CandidateValues accuracies{};
  for (Candidate& c : candidates) {
    const EvalOutcome out = evaluate(c.model, chunk, c.detector);
    accuracies[static_cast<std::size_t>(c.kind)] = out.accuracy;
    c.accuracy_log.push_back(out.accuracy);
    if (out.statistic > c.detector.threshold()) {
      c.model = adapt(c.model, chunk);
      c.detector.reset();
    } else if (mode == TrainingMode::kContinual) {
      c.model.train(chunk);
    }
  }
  return accuracies;
}

Finalization finalize_comparison(const CandidateSet& candidates) {
  CandidateValues means{};
  for (const Candidate& c : candidates) {
    if (c.accuracy_log.empty()) {
      throw StateError("candidate " + std::string(to_string(c.kind)) + " has an empty log");
    }
    means[static_cast<std::size_t>(c.kind)] =
        std::accumulate(c.accuracy_log.begin(), c.accuracy_log.end(), 0.0) /
        static_cast<double>(c.accuracy_log.size());
  }
  const CandidateKind winner = argmax_with_priority(means);
  const Candidate& w = candidates[winner];
  return Finalization{winner, means, w.model, w.detector};
}

void DtdConfig::validate() const {
  if (comparison_length == 0) throw ConfigError("comparison length K must be at least 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
}

DtdState::DtdState(GaussianNB model, DriftMonitor detector, DtdConfig config,
                   std::optional<Chunk> warmup)
    : config_(config),
      model_(std::move(model)),
      last_model_(model_),
      detector_(std::move(detector)),
      previous_chunk_(std::move(warmup)) {
  config_.validate();
  if (!model_.fitted()) throw ModelError("DTD requires a fitted initial model");
}

StepReport DtdState::step(const Chunk& chunk) {
  const OpCounts before = thread_op_counts();
  StepReport report = in_comparison() ? comparison_step(chunk) : normal_step(chunk);
  const OpCounts after = thread_op_counts();
  report.cost = {after.predictions - before.predictions, after.trained - before.trained};
  previous_chunk_ = chunk;
  return report;
}

StepReport DtdState::normal_step(const Chunk& chunk) {
  StepReport report;
  report.phase = Phase::kNormal;
  const EvalOutcome out = evaluate(model_, chunk, detector_);
  report.accuracy = out.accuracy;
  report.statistic = out.statistic;
  report.alarm = detector_.alarm();

  if (report.alarm && !previous_chunk_) {
    // No C_{t-1} to build EDM from: plain reactive adaptation.
    last_model_ = model_;
    model_ = adapt(model_, chunk);
    detector_.reset();
  } else if (report.alarm) {
    candidates_ = create_candidates(
        CandidateInputs{model_, last_model_, chunk, &*previous_chunk_, out.accuracy,
                        out.statistic, previous_statistic_, detector_},
        config_.eta, config_.mode);
    countdown_ = config_.comparison_length;
    leader_ = CandidateKind::kRdm;
    // M is replaced when the phase closes, so it is not trained on the alarm chunk.
    last_model_ = model_;
  } else {
    last_model_ = model_;
    if (config_.mode == TrainingMode::kContinual) model_.train(chunk);
  }
  previous_statistic_ = out.statistic;
  report.threshold = detector_.threshold();
  return report;
}

StepReport DtdState::comparison_step(const Chunk& chunk) {
  StepReport report;
  report.phase = Phase::kComparison;
  CandidateSet& cands = *candidates_;
  const CandidateValues acc = eval_candidates(cands, chunk, config_.mode);
  --countdown_;
  report.accuracy = at(acc, leader_);
  report.statistic = cands[leader_].detector.statistic();
  leader_ = argmax_with_priority(acc);

  if (countdown_ == 0) {
    Finalization fin = finalize_comparison(cands);
    model_ = std::move(fin.model);
    detector_ = std::move(fin.detector);
    last_model_ = model_;
    previous_statistic_ = detector_.statistic();
    report.winner = fin.winner;
    candidates_.reset();
    leader_ = CandidateKind::kRdm;
  }
  report.threshold = detector_.threshold();
  return report;
}

}  // namespace dtdrift
