#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgcast/bench.hpp"
#include "kgcast/graph.hpp"
#include "kgcast/model.hpp"
#include "kgcast/pagerank.hpp"
#include "kgcast/synth.hpp"

namespace kgcast {

// Dataset-stage knobs: which snapshot year feeds the features, how far the
// label window reaches, the impact threshold, and the sampling budget.
struct DatasetParams {
  int year = 2019;
  int delta = 3;
  int64_t ir = 3;
  uint64_t sample_size = 100000;
  uint64_t seed = 20240101;
  int64_t min_positives = 10;
};

// One JSON tree resolved in four layers, later layers winning key by key:
// built-in defaults, then the config file, then KGCAST_* environment
// variables, then --set flags. Every key must already exist in the defaults
// tree, so typos fail loudly instead of silently reverting to a default.
class PipelineConfig {
 public:
  static PipelineConfig defaults();
  // Parses `file` and merges it over the defaults.
  static PipelineConfig load(const std::filesystem::path& file);

  // Scans the process environment for KGCAST_SECTION__KEY=value entries
  // (double underscore separates path segments, case-insensitive).
  void apply_env();
  // One "dotted.path=value" assignment; the value is parsed as JSON when it
  // looks like JSON, else kept as a string.
  void apply_override(const std::string& assignment);

  const nlohmann::json& tree() const { return tree_; }
  // FNV-1a over the canonical (sorted-key) dump; stamped into every artifact.
  uint64_t hash() const;
  std::string dump() const;

  // Dotted-path lookup; throws ValidationError naming the key when absent.
  const nlohmann::json& at(const std::string& dotted) const;

  // Typed views of the standard sections.
  std::filesystem::path path(const std::string& name) const;  // paths.<name>
  int64_t t2() const;
  int64_t t3() const;
  YearRange years() const;
  PagerankParams pagerank() const;
  DatasetParams dataset() const;
  Hyperparameters model() const;
  GridSpec grid() const;
  SynthParams synth() const;

 private:
  nlohmann::json tree_;
  void set_path(const std::string& dotted, nlohmann::json value);
};

}  // namespace kgcast
