#include "dtdrift/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "dtdrift/error.hpp"
#include "dtdrift/rng.hpp"

namespace dtdrift {

std::string_view to_string(Method method) {
  return method == Method::kBaseline ? "baseline" : "dtd";
}

Method parse_method(std::string_view name) {
  if (name == "baseline") return Method::kBaseline;
  if (name == "dtd" || name == "DTD") return Method::kDtd;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<std::uint64_t> ExperimentConfig::default_seeds(std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  return seeds;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("experiment name must not be empty");
  stream.validate();
  detector.params.validate();
  if (detector.threshold && std::isnan(*detector.threshold)) {
    throw ConfigError("detector threshold must not be NaN");
  }
  if (classifier != "gnb") throw ConfigError("unsupported classifier '" + classifier + "'");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  dtd_config().validate();
}

double SeedResult::mean_accuracy() const {
  if (trace.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : trace) sum += r.accuracy;
  return sum / static_cast<double>(trace.size());
}

std::vector<std::size_t> SeedResult::alarm_chunks() const {
  std::vector<std::size_t> out;
  for (const auto& r : trace) {
    if (r.alarm) out.push_back(r.chunk_index);
  }
  return out;
}

std::vector<double> SeedResult::threshold_trajectory() const {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) out.push_back(r.threshold);
  return out;
}

double ExperimentResult::mean_accuracy() const {
  if (seeds.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : seeds) sum += s.mean_accuracy();
  return sum / static_cast<double>(seeds.size());
}

double ExperimentResult::stddev_accuracy() const {
  if (seeds.empty()) return 0.0;
  const double mu = mean_accuracy();
  double ss = 0.0;
  for (const auto& s : seeds) {
    const double d = s.mean_accuracy() - mu;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(seeds.size()));
}

namespace {

void require_warmup(const Stream& stream) {
  if (stream.size() < 2) throw ConfigError("stream needs at least two chunks (one for warm-up)");
}

OpCounts diff(const OpCounts& after, const OpCounts& before) {
  return {after.predictions - before.predictions, after.trained - before.trained};
}

}  // namespace

SeedResult run_baseline_stream(const Stream& stream, DriftMonitor detector, TrainingMode mode,
                               const ThresholdSchedule& schedule) {
  require_warmup(stream);
  SeedResult result;
  result.trace.reserve(stream.size() - 1);
  GaussianNB model;
  model.train(stream.front());

  for (std::size_t t = 1; t < stream.size(); ++t) {
    const Chunk& chunk = stream[t];
    // A scheduled threshold may be infinite, so compare here instead of
    // writing it into the detector.
    const double theta = schedule ? schedule(chunk.index) : detector.threshold();
    const OpCounts before = thread_op_counts();
    const EvalOutcome out = evaluate(model, chunk, detector);
    const bool alarm = out.statistic > theta;
    if (alarm) {
      model = adapt(model, chunk);
      detector.reset();
    } else if (mode == TrainingMode::kContinual) {
      model.train(chunk);
    }
    ChunkRecord rec;
    rec.chunk_index = chunk.index;
    rec.accuracy = out.accuracy;
    rec.statistic = out.statistic;
    rec.threshold = theta;
    rec.alarm = alarm;
    rec.phase = Phase::kNormal;
    rec.cost = diff(thread_op_counts(), before);
    result.trace.push_back(rec);
  }
  return result;
}

SeedResult run_dtd_stream(const Stream& stream, DriftMonitor detector, const DtdConfig& config) {
  require_warmup(stream);
  SeedResult result;
  result.trace.reserve(stream.size() - 1);
  GaussianNB model;
  model.train(stream.front());
  DtdState state(std::move(model), std::move(detector), config, stream.front());

  for (std::size_t t = 1; t < stream.size(); ++t) {
    const StepReport step = state.step(stream[t]);
    ChunkRecord rec;
    rec.chunk_index = stream[t].index;
    rec.accuracy = step.accuracy;
    rec.statistic = step.statistic;
    rec.threshold = step.threshold;
    rec.alarm = step.alarm;
    rec.phase = step.phase;
    rec.winner = step.winner;
    rec.cost = step.cost;
    result.trace.push_back(rec);
  }
  return result;
}

Stream stream_for_seed(const ExperimentConfig& config, std::uint64_t seed) {
  StreamConfig sc = config.stream;
  sc.seed = seed;
  return make_stream(sc);
}

DriftMonitor detector_for_seed(const ExperimentConfig& config, std::uint64_t seed) {
  DetectorParams params = config.detector.params;
  params.kswin_seed = derive_seed(params.kswin_seed, seed);
  return DriftMonitor::make(config.detector.kind, params, config.detector.initial_threshold());
}

SeedResult run_seed(const ExperimentConfig& config, Method method, std::uint64_t seed) {
  const Stream stream = stream_for_seed(config, seed);
  DriftMonitor detector = detector_for_seed(config, seed);
  SeedResult result = method == Method::kBaseline
                          ? run_baseline_stream(stream, std::move(detector), config.mode)
                          : run_dtd_stream(stream, std::move(detector), config.dtd_config());
  result.seed = seed;
  return result;
}

void parallel_for(std::size_t jobs, std::size_t parallel,
                  const std::function<void(std::size_t)>& body) {
  if (parallel == 0) parallel = std::max(1u, std::thread::hardware_concurrency());
  parallel = std::min(parallel, jobs);
  if (parallel <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(parallel);
  for (std::size_t w = 0; w < parallel; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = jobs;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_method(const ExperimentConfig& config, Method method, std::size_t parallel) {
  config.validate();
  ExperimentResult result;
  result.name = config.name;
  result.method = method;
  result.seeds.resize(config.seeds.size());
  parallel_for(config.seeds.size(), parallel, [&](std::size_t i) {
    result.seeds[i] = run_seed(config, method, config.seeds[i]);
  });
  return result;
}

ExperimentResult run_baseline(const ExperimentConfig& config, std::size_t parallel) {
  return run_method(config, Method::kBaseline, parallel);
}

ExperimentResult run_dtd(const ExperimentConfig& config, std::size_t parallel) {
  return run_method(config, Method::kDtd, parallel);
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ec == std::errc{} ? ptr : buf);
}

}  // namespace

std::string trace_csv(const SeedResult& seed) {
  std::string out = "chunk_index,accuracy,statistic,threshold,alarm,phase\n";
  for (const auto& r : seed.trace) {
    out += std::to_string(r.chunk_index);
    out += ',';
    append_number(out, r.accuracy);
    out += ',';
    append_number(out, r.statistic);
    out += ',';
    append_number(out, r.threshold);
    out += r.alarm ? ",1," : ",0,";
    out += to_string(r.phase);
    out += '\n';
  }
  return out;
}

std::string experiment_summary_json(const ExperimentResult& result) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["name"] = result.name;
  j["method"] = std::string(to_string(result.method));
  j["mean_accuracy_pct"] = 100.0 * result.mean_accuracy();
  j["std_accuracy_pct"] = 100.0 * result.stddev_accuracy();
  ordered_json seeds = ordered_json::array();
  for (const auto& s : result.seeds) {
    ordered_json js;
    js["seed"] = s.seed;
    js["chunks"] = s.trace.size();
    js["mean_accuracy_pct"] = 100.0 * s.mean_accuracy();
    js["alarms"] = s.alarm_chunks();
    ordered_json winners = ordered_json::array();
    for (const auto& r : s.trace) {
      if (r.winner) {
        winners.push_back({{"chunk", r.chunk_index}, {"winner", std::string(to_string(*r.winner))}});
      }
    }
    js["finalizations"] = winners;
    js["thresholds"] = s.threshold_trajectory();
    seeds.push_back(std::move(js));
  }
  j["seeds"] = std::move(seeds);
  return j.dump(2) + "\n";
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
  };
  for (const auto& s : result.seeds) {
    write(dir / ("seed" + std::to_string(s.seed) + ".csv"), trace_csv(s));
  }
  write(dir / "summary.json", experiment_summary_json(result));
}

}  // namespace dtdrift

namespace dtdrift {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot read '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

double parse_double(std::string_view cell, const std::filesystem::path& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ReportError(path.string() + ": bad number '" + std::string(cell) + "'");
  }
  return v;
}

SeedResult parse_trace(std::uint64_t seed, const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::string_view rest = text;
  SeedResult out;
  out.seed = seed;
  bool header = true;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string_view> cells;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 6) throw ReportError(path.string() + ": expected 6 columns");
    ChunkRecord r;
    r.chunk_index = static_cast<std::size_t>(parse_double(cells[0], path));
    r.accuracy = parse_double(cells[1], path);
    r.statistic = parse_double(cells[2], path);
    r.threshold = parse_double(cells[3], path);
    r.alarm = cells[4] == "1";
    r.phase = cells[5] == "comparison" ? Phase::kComparison : Phase::kNormal;
    out.trace.push_back(r);
  }
  return out;
}

}  // namespace

ExperimentResult read_experiment(const std::filesystem::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(dir / "summary.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ReportError((dir / "summary.json").string() + ": " + e.what());
  }
  ExperimentResult result;
  try {
    result.name = j.at("name").get<std::string>();
    result.method = parse_method(j.at("method").get<std::string>());
    for (const auto& js : j.at("seeds")) {
      const auto seed = js.at("seed").get<std::uint64_t>();
      SeedResult s = parse_trace(seed, dir / ("seed" + std::to_string(seed) + ".csv"));
      for (const auto& f : js.at("finalizations")) {
        const auto chunk = f.at("chunk").get<std::size_t>();
        const auto name = f.at("winner").get<std::string>();
        for (auto& r : s.trace) {
          if (r.chunk_index != chunk) continue;
          for (CandidateKind k : kCandidateKinds) {
            if (to_string(k) == name) r.winner = k;
          }
        }
      }
      result.seeds.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ReportError((dir / "summary.json").string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ReportError((dir / "summary.json").string() + ": " + e.what());
  }
  return result;
}

}  // namespace dtdrift
