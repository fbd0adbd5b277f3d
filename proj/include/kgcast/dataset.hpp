#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kgcast/graph.hpp"
#include "kgcast/rng.hpp"
#include "kgcast/snapshot.hpp"

namespace kgcast {

struct LabeledPair {
  int32_t u = 0;
  int32_t v = 0;
  int64_t future_citations = 0;
  bool label = false;
};

// Uniform sample, without replacement, over unordered pairs unconnected at
// the snapshot. Deterministic given seed. Throws when count exceeds the
// unconnected-pair population (error names the population size).
std::vector<std::pair<int32_t, int32_t>> sample_unconnected(const GraphSnapshot& snapshot, uint64_t count,
                                                            uint64_t seed);

// Attaches the label source: citations over calendar years (y, y+delta] of
// all papers ever co-mentioning the pair. label = citations >= ir.
std::vector<LabeledPair> label_pairs(const EvolvingGraph& graph, const std::vector<std::pair<int32_t, int32_t>>& pairs,
                                     int y, int delta, int64_t ir);

// The conditioned variant: only pairs unconnected at y but connected at
// y+delta; positive iff citations >= high, negative iff <= low, the band in
// between is excluded. Throws when either class ends up empty (naming it).
std::vector<LabeledPair> conditioned_pairs(const EvolvingGraph& graph, int y, int delta, int64_t low, int64_t high);

struct SplitIndices {
  std::vector<uint32_t> train;
  std::vector<uint32_t> test;
};

// Keeps every positive, samples an equal number of negatives, then splits
// 85/15 stratified per class. Indices refer to `labeled`. min_positives
// mirrors the benchmark guard.
SplitIndices balanced_build(const std::vector<LabeledPair>& labeled, uint64_t seed, int64_t min_positives = 10);

// Endless stream of half-positive half-negative batches drawn with
// replacement from a training set. Yields positions into the `labels` vector
// handed to the constructor.
class BalancedBatcher {
 public:
  BalancedBatcher(const std::vector<uint8_t>& labels, int batch_size, uint64_t seed);
  std::vector<uint32_t> next();
  int batch_size() const { return batch_size_; }

 private:
  std::vector<uint32_t> pos_, neg_;
  int batch_size_;
  Rng rng_;
};

struct StandardStats {
  std::vector<double> mean;
  std::vector<double> stdev;  // population std; zero marks a constant column

  bool empty() const { return mean.empty(); }
};

StandardStats standardize_fit(const double* values, size_t rows, size_t cols);
// z-scores in place; columns with stdev 0 map to 0.
void standardize_apply(double* values, size_t rows, size_t cols, const StandardStats& stats);

}  // namespace kgcast
