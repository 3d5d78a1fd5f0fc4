#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <type_traits>

#include <json.hpp>

#include "dtdrift/error.hpp"
#include "dtdrift/harness.hpp"

namespace dtdrift {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const char* where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    if constexpr (std::is_unsigned_v<T>) {
      const json& v = obj.at(key);
      if (!v.is_number_unsigned()) {
        throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
      }
    }
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string read_string(const json& obj, const char* key, std::string fallback) {
  read(obj, key, fallback);
  return fallback;
}

StreamConfig parse_stream(const json& j) {
  reject_unknown(j,
                 {"generator", "n_chunks", "chunk_size", "drift_period", "noise", "path",
                  "header"},
                 "stream");
  StreamConfig sc;
  sc.generator = parse_generator_kind(read_string(j, "generator", "sea"));
  read(j, "n_chunks", sc.n_chunks);
  read(j, "chunk_size", sc.chunk_size);
  read(j, "drift_period", sc.drift_period);
  read(j, "noise", sc.noise);
  std::string path;
  read(j, "path", path);
  sc.csv_path = path;
  read(j, "header", sc.csv_header);
  return sc;
}

DetectorConfig parse_detector(const json& j) {
  reject_unknown(j, {"kind", "threshold", "params"}, "detector");
  DetectorConfig dc;
  dc.kind = parse_detector_kind(read_string(j, "kind", "DDM"));
  if (j.contains("threshold") && !j.at("threshold").is_null()) {
    double t = 0.0;
    read(j, "threshold", t);
    dc.threshold = t;
  }
  if (j.contains("params")) {
    const json& p = j.at("params");
    reject_unknown(p,
                   {"ddm_min_samples", "ddm_threshold", "ph_delta", "ph_threshold",
                    "kswin_window", "kswin_recent", "kswin_alpha", "kswin_seed", "hddm_a_alpha",
                    "hddm_a_threshold", "hddm_w_lambda", "hddm_w_alpha", "hddm_w_threshold"},
                   "detector.params");
    auto& d = dc.params;
    read(p, "ddm_min_samples", d.ddm_min_samples);
    read(p, "ddm_threshold", d.ddm_threshold);
    read(p, "ph_delta", d.ph_delta);
    read(p, "ph_threshold", d.ph_threshold);
    read(p, "kswin_window", d.kswin_window);
    read(p, "kswin_recent", d.kswin_recent);
    read(p, "kswin_alpha", d.kswin_alpha);
    read(p, "kswin_seed", d.kswin_seed);
    read(p, "hddm_a_alpha", d.hddm_a_alpha);
    read(p, "hddm_a_threshold", d.hddm_a_threshold);
    read(p, "hddm_w_lambda", d.hddm_w_lambda);
    read(p, "hddm_w_alpha", d.hddm_w_alpha);
    read(p, "hddm_w_threshold", d.hddm_w_threshold);
  }
  return dc;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"name", "stream", "detector", "classifier", "mode", "method", "methods", "K",
                  "eta", "seeds", "n_seeds", "output"},
                 "config");
  ExperimentConfig c;
  read(j, "name", c.name);
  if (j.contains("stream")) c.stream = parse_stream(j.at("stream"));
  if (j.contains("detector")) c.detector = parse_detector(j.at("detector"));
  if (j.contains("classifier")) {
    const json& cl = j.at("classifier");
    if (cl.is_string()) {
      c.classifier = cl.get<std::string>();
    } else {
      reject_unknown(cl, {"kind"}, "classifier");
      c.classifier = read_string(cl, "kind", "gnb");
    }
  }
  c.mode = parse_training_mode(read_string(j, "mode", "continual"));
  if (j.contains("method") && j.contains("methods")) {
    throw ConfigError("use either 'method' or 'methods', not both");
  }
  if (j.contains("method")) {
    const std::string m = read_string(j, "method", "both");
    c.methods = m == "both" ? std::vector<Method>{Method::kBaseline, Method::kDtd}
                            : std::vector<Method>{parse_method(m)};
  }
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names);
    c.methods.clear();
    for (const auto& n : names) c.methods.push_back(parse_method(n));
  }
  read(j, "K", c.comparison_length);
  read(j, "eta", c.eta);
  if (j.contains("seeds") && j.contains("n_seeds")) {
    throw ConfigError("use either 'seeds' or 'n_seeds', not both");
  }
  if (j.contains("seeds")) {
    const json& seeds = j.at("seeds");
    if (!seeds.is_array() ||
        !std::all_of(seeds.begin(), seeds.end(), [](const json& v) { return v.is_number_unsigned(); })) {
      throw ConfigError("'seeds' must be a list of non-negative integers");
    }
  }
  read(j, "seeds", c.seeds);
  if (j.contains("n_seeds")) {
    std::size_t n = 0;
    read(j, "n_seeds", n);
    c.seeds = ExperimentConfig::default_seeds(n);
  }
  std::string output = c.output.string();
  read(j, "output", output);
  c.output = output;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  nlohmann::ordered_json s;
  s["generator"] = std::string(to_string(c.stream.generator));
  s["n_chunks"] = c.stream.n_chunks;
  s["chunk_size"] = c.stream.chunk_size;
  s["drift_period"] = c.stream.drift_period;
  s["noise"] = c.stream.noise;
  if (c.stream.generator == GeneratorKind::kCsv) {
    s["path"] = c.stream.csv_path.string();
    s["header"] = c.stream.csv_header;
  }
  j["stream"] = s;
  nlohmann::ordered_json d;
  d["kind"] = std::string(to_string(c.detector.kind));
  if (c.detector.threshold) d["threshold"] = *c.detector.threshold;
  const auto& p = c.detector.params;
  d["params"] = {{"ddm_min_samples", p.ddm_min_samples}, {"ddm_threshold", p.ddm_threshold},
                 {"ph_delta", p.ph_delta},               {"ph_threshold", p.ph_threshold},
                 {"kswin_window", p.kswin_window},       {"kswin_recent", p.kswin_recent},
                 {"kswin_alpha", p.kswin_alpha},         {"kswin_seed", p.kswin_seed},
                 {"hddm_a_alpha", p.hddm_a_alpha},       {"hddm_a_threshold", p.hddm_a_threshold},
                 {"hddm_w_lambda", p.hddm_w_lambda},     {"hddm_w_alpha", p.hddm_w_alpha},
                 {"hddm_w_threshold", p.hddm_w_threshold}};
  j["detector"] = d;
  j["classifier"] = c.classifier;
  j["mode"] = std::string(to_string(c.mode));
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(to_string(m));
  j["methods"] = methods;
  j["K"] = c.comparison_length;
  j["eta"] = c.eta;
  j["seeds"] = c.seeds;
  j["output"] = c.output.string();
  return j.dump(2) + "\n";
}

}  // namespace dtdrift
