#include "kgcast/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kgcast/errors.hpp"
#include "kgcast/hash.hpp"

extern char** environ;

namespace kgcast {

namespace {

constexpr const char* kEnvPrefix = "KGCAST_";

std::vector<std::string> split_dotted(const std::string& dotted) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(dotted);
  while (std::getline(in, part, '.')) {
    if (!part.empty()) parts.push_back(part);
  }
  if (parts.empty()) throw ValidationError("empty config key");
  return parts;
}

const std::vector<std::string>& hyperparameter_keys();

// The model section is sparse: only the keys the user pins are stored, and
// the rest fall back to the chosen kind's defaults at read time. Any valid
// hyperparameter name is therefore accepted under it.
bool is_model_section_key(const std::string& section, const std::string& key) {
  if (section != "model") return false;
  const auto& known = hyperparameter_keys();
  return std::find(known.begin(), known.end(), key) != known.end();
}

// File layers merge into the defaults object by object; scalars and arrays
// replace. A key with no counterpart in the defaults is a typo, not a
// feature.
void merge_into(nlohmann::json& base, const nlohmann::json& layer, const std::string& where) {
  if (!layer.is_object()) throw ValidationError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : layer.items()) {
    const std::string full = where.empty() ? key : where + "." + key;
    auto it = base.find(key);
    if (it == base.end()) {
      if (!is_model_section_key(where, key)) throw ValidationError("unknown config key: " + full);
      base[key] = value;
      continue;
    }
    if (it->is_object() && value.is_object()) {
      merge_into(*it, value, full);
    } else {
      *it = value;
    }
  }
}

nlohmann::json parse_flag_value(const std::string& text) {
  const nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return nlohmann::json(text);  // bare word, e.g. a path or model kind
}

// Typed getter with the key name folded into any error.
template <typename T>
T fetch(const nlohmann::json& tree, const std::string& dotted) {
  const nlohmann::json* node = &tree;
  for (const std::string& part : split_dotted(dotted)) {
    auto it = node->find(part);
    if (node->is_object() && it != node->end()) {
      node = &*it;
    } else {
      throw ValidationError("missing config key: " + dotted);
    }
  }
  try {
    return node->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config key " + dotted + ": " + e.what());
  }
}

Interval parse_interval(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("config key " + where + ": an interval is a [start, end] pair");
  Interval iv;
  iv.start = j.at(0).get<int>();
  iv.end = j.at(1).get<int>();
  if (iv.end <= iv.start) throw ValidationError("config key " + where + ": interval end must exceed start");
  return iv;
}

const std::vector<std::string>& hyperparameter_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, value] : Hyperparameters{}.to_json().items()) out.push_back(key);
    return out;
  }();
  return keys;
}

Hyperparameters parse_model_entry(const nlohmann::json& j, const std::string& where) {
  if (j.is_string()) return Hyperparameters::defaults_for(parse_model_kind(j.get<std::string>()));
  if (!j.is_object()) throw ValidationError("config key " + where + ": expected a kind name or an object");
  const auto& known = hyperparameter_keys();
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config key " + where + "." + key + ": unknown hyperparameter");
  }
  try {
    return Hyperparameters::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config key " + where + ": " + e.what());
  }
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  cfg.tree_ = nlohmann::json{
      {"paths",
       {{"corpus", "data/corpus.jsonl"},
        {"stopwords", "assets/stopwords_en.txt"},
        {"filters", "assets/concept_filters.txt"},
        {"ingested", "out/corpus.jsonl"},
        {"lexicon", "out/lexicon.tsv"},
        {"graph", "out/graph.bin"},
        {"matrices", "out/matrices"},
        {"models", "out/models"},
        {"reports", "out/reports"}}},
      {"thresholds", {{"t2", 9}, {"t3", 6}}},
      {"years", {{"first", 2012}, {"last", 2023}}},
      {"pagerank", {{"damping", 0.85}, {"tolerance", 1e-8}, {"max_iters", 100}}},
      {"dataset",
       {{"year", 2019},
        {"delta", 3},
        {"ir", 3},
        {"sample_size", 100000},
        {"seed", 20240101},
        {"min_positives", 10}}},
      {"model", {{"kind", "nn"}}},
      {"grid",
       {{"models", nlohmann::json::array({Hyperparameters::benchmark_nn().to_json()})},
        {"train_intervals", nlohmann::json::array({{2016, 2019}})},
        {"eval_intervals", nlohmann::json::array({{2019, 2022}})},
        {"irs", {3}},
        {"sample_size", 10000},
        {"seed", 20240101},
        {"min_positives", 10},
        {"no_retrain", false}}},
      {"synth",
       {{"n_concepts", 200},
        {"n_papers", 2000},
        {"years", {{"first", 2012}, {"last", 2023}}},
        {"concepts_mean", 4.0},
        {"concepts_cap", 8},
        {"alpha", 1.0},
        {"lambda0", 0.4},
        {"beta", 6.0},
        {"tail_shape", 1.0},
        {"drift", 0.0},
        {"mode", "planted"},
        {"seed", 20240101}}}};
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read config file " + file.string());
  nlohmann::json layer;
  try {
    in >> layer;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + file.string() + " is not valid JSON: " + e.what());
  }
  PipelineConfig cfg = defaults();
  merge_into(cfg.tree_, layer, "");
  return cfg;
}

void PipelineConfig::set_path(const std::string& dotted, nlohmann::json value) {
  const std::vector<std::string> parts = split_dotted(dotted);
  nlohmann::json* node = &tree_;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) {
      const std::string section = i == 0 ? std::string() : parts[i - 1];
      if (i + 1 == parts.size() && is_model_section_key(section, parts[i])) {
        (*node)[parts[i]] = nlohmann::json();
      } else {
        throw ValidationError("unknown config key: " + dotted);
      }
    }
    node = &(*node)[parts[i]];
  }
  if (node->is_object()) throw ValidationError("config key " + dotted + " is a section, not a value");
  *node = std::move(value);
}

void PipelineConfig::apply_env() {
  for (char** env = environ; env && *env; ++env) {
    const std::string entry(*env);
    if (entry.rfind(kEnvPrefix, 0) != 0) continue;
    const size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(std::string(kEnvPrefix).size(), eq - std::string(kEnvPrefix).size());
    for (char& c : key) c = char(std::tolower(static_cast<unsigned char>(c)));
    size_t pos;
    while ((pos = key.find("__")) != std::string::npos) key.replace(pos, 2, ".");
    set_path(key, parse_flag_value(entry.substr(eq + 1)));
  }
}

void PipelineConfig::apply_override(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("--set expects key.path=value, got '" + assignment + "'");
  set_path(assignment.substr(0, eq), parse_flag_value(assignment.substr(eq + 1)));
}

uint64_t PipelineConfig::hash() const { return fnv64(tree_.dump()); }

std::string PipelineConfig::dump() const { return tree_.dump(2) + "\n"; }

const nlohmann::json& PipelineConfig::at(const std::string& dotted) const {
  const nlohmann::json* node = &tree_;
  for (const std::string& part : split_dotted(dotted)) {
    auto it = node->find(part);
    if (node->is_object() && it != node->end()) {
      node = &*it;
    } else {
      throw ValidationError("missing config key: " + dotted);
    }
  }
  return *node;
}

std::filesystem::path PipelineConfig::path(const std::string& name) const {
  return std::filesystem::path(fetch<std::string>(tree_, "paths." + name));
}

int64_t PipelineConfig::t2() const { return fetch<int64_t>(tree_, "thresholds.t2"); }
int64_t PipelineConfig::t3() const { return fetch<int64_t>(tree_, "thresholds.t3"); }

YearRange PipelineConfig::years() const {
  YearRange yr{fetch<int>(tree_, "years.first"), fetch<int>(tree_, "years.last")};
  if (yr.last < yr.first) throw ValidationError("config years.last precedes years.first");
  return yr;
}

PagerankParams PipelineConfig::pagerank() const {
  PagerankParams p;
  p.damping = fetch<double>(tree_, "pagerank.damping");
  p.tolerance = fetch<double>(tree_, "pagerank.tolerance");
  p.max_iters = fetch<int>(tree_, "pagerank.max_iters");
  if (p.damping <= 0.0 || p.damping >= 1.0) throw ValidationError("config pagerank.damping must lie in (0, 1)");
  if (p.max_iters < 1) throw ValidationError("config pagerank.max_iters must be positive");
  return p;
}

DatasetParams PipelineConfig::dataset() const {
  DatasetParams d;
  d.year = fetch<int>(tree_, "dataset.year");
  d.delta = fetch<int>(tree_, "dataset.delta");
  d.ir = fetch<int64_t>(tree_, "dataset.ir");
  d.sample_size = fetch<uint64_t>(tree_, "dataset.sample_size");
  d.seed = fetch<uint64_t>(tree_, "dataset.seed");
  d.min_positives = fetch<int64_t>(tree_, "dataset.min_positives");
  if (d.delta < 1) throw ValidationError("config dataset.delta must be at least 1");
  if (d.ir < 1) throw ValidationError("config dataset.ir must be at least 1");
  if (d.sample_size == 0) throw ValidationError("config dataset.sample_size must be positive");
  return d;
}

Hyperparameters PipelineConfig::model() const { return parse_model_entry(at("model"), "model"); }

GridSpec PipelineConfig::grid() const {
  GridSpec spec;
  const nlohmann::json& g = at("grid");
  const nlohmann::json& models = g.at("models");
  if (!models.is_array() || models.empty()) throw ValidationError("config grid.models must be a non-empty array");
  for (size_t i = 0; i < models.size(); ++i) {
    spec.models.push_back(parse_model_entry(models.at(i), "grid.models[" + std::to_string(i) + "]"));
  }
  for (const char* which : {"train_intervals", "eval_intervals"}) {
    const nlohmann::json& list = g.at(which);
    if (!list.is_array() || list.empty())
      throw ValidationError(std::string("config grid.") + which + " must be a non-empty array");
    auto& target = std::string(which) == "train_intervals" ? spec.train_intervals : spec.eval_intervals;
    for (size_t i = 0; i < list.size(); ++i) {
      target.push_back(parse_interval(list.at(i), std::string("grid.") + which + "[" + std::to_string(i) + "]"));
    }
  }
  spec.irs = fetch<std::vector<int64_t>>(tree_, "grid.irs");
  if (spec.irs.empty()) throw ValidationError("config grid.irs must be a non-empty array");
  spec.sample_size = fetch<uint64_t>(tree_, "grid.sample_size");
  spec.seed = fetch<uint64_t>(tree_, "grid.seed");
  spec.min_positives = fetch<int64_t>(tree_, "grid.min_positives");
  spec.no_retrain = fetch<bool>(tree_, "grid.no_retrain");
  return spec;
}

SynthParams PipelineConfig::synth() const {
  SynthParams p;
  p.n_concepts = fetch<int>(tree_, "synth.n_concepts");
  p.n_papers = fetch<int>(tree_, "synth.n_papers");
  p.years = YearRange{fetch<int>(tree_, "synth.years.first"), fetch<int>(tree_, "synth.years.last")};
  p.concepts_mean = fetch<double>(tree_, "synth.concepts_mean");
  p.concepts_cap = fetch<int>(tree_, "synth.concepts_cap");
  p.alpha = fetch<double>(tree_, "synth.alpha");
  p.lambda0 = fetch<double>(tree_, "synth.lambda0");
  p.beta = fetch<double>(tree_, "synth.beta");
  p.tail_shape = fetch<double>(tree_, "synth.tail_shape");
  p.drift = fetch<double>(tree_, "synth.drift");
  const std::string mode = fetch<std::string>(tree_, "synth.mode");
  if (mode == "planted") p.mode = SignalMode::planted;
  else if (mode == "null") p.mode = SignalMode::null_control;
  else throw ValidationError("config synth.mode must be 'planted' or 'null', got '" + mode + "'");
  p.seed = fetch<uint64_t>(tree_, "synth.seed");
  return p;
}

}  // namespace kgcast
