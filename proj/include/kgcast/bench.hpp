#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgcast/graph.hpp"
#include "kgcast/lexicon.hpp"
#include "kgcast/matrix.hpp"
#include "kgcast/model.hpp"

namespace kgcast {

struct FeatureAuc {
  int index = 0;
  std::string name;
  double auc_value = 0.5;
  bool degenerate = false;  // constant training column, nothing to fit
};

// Trains one single-input model (hp.hidden on top of that column alone) per
// feature on train_data's train rows, then scores every row of eval_data.
// Rows come back sorted by AUC descending, ties by feature index. Only
// network kinds make sense here.
std::vector<FeatureAuc> per_feature_auc(const FeatureMatrix& train_data, const FeatureMatrix& eval_data,
                                        const Hyperparameters& hp);

// CSV "feature_index,feature_name,auc,degenerate".
void write_feature_auc_csv(const std::vector<FeatureAuc>& rows, std::ostream& out);

// Snapshot-year interval: features at `start`, labels over calendar years
// (start, end].
struct Interval {
  int start = 0;
  int end = 0;

  bool operator==(const Interval&) const = default;
};

struct GridSpec {
  std::vector<Hyperparameters> models;
  std::vector<Interval> train_intervals;
  std::vector<Interval> eval_intervals;
  std::vector<int64_t> irs;
  uint64_t sample_size = 10000;   // unconnected pairs drawn per snapshot year
  uint64_t seed = 0;
  int64_t min_positives = 10;     // guard on both train and eval positives
  bool no_retrain = false;        // one model per (hp, train interval, ir), shared across eval intervals
  int workers = 1;                // intra-cell parallelism (feature rows, prediction)
};

struct BenchmarkCell {
  std::string model;
  Interval train;
  Interval eval;
  int64_t ir = 0;
  double auc_value = 0.0;
  int64_t positives = 0;   // in the eval sample
  int64_t negatives = 0;
  bool skipped = false;
  std::string reason;      // guard or per-cell error text; empty when populated
};

// Full cross product models x train intervals x irs x eval intervals.
// Snapshots, samples, feature rows, and labels are computed once per year
// and shared. Without no_retrain every cell trains its own run (seed derived
// from all four coordinates); with it, cells sharing (model, train, ir)
// reuse one trained model. Cells that fail a guard or throw are recorded as
// skipped with the reason; the grid always completes.
std::vector<BenchmarkCell> benchmark_grid(const EvolvingGraph& graph, const GridSpec& spec);

// Long-format CSV, one row per cell:
// model,train_start,train_end,eval_start,eval_end,ir,auc,positives,negatives,status
void write_grid_csv(const std::vector<BenchmarkCell>& cells, std::ostream& out);

// Per-pair exploration export: phrase pair, model score, and a handful of
// interpretable columns pulled straight from the feature row (cosine
// similarity, mean degree, mean count of fresh neighbors, citations per
// mentioning paper, each concept's total citations).
void write_explore_csv(const ConceptLexicon& lexicon, const FeatureMatrix& data, const std::vector<double>& scores,
                       std::ostream& out);

}  // namespace kgcast
