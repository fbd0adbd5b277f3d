#include "kgcast/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>

#include "kgcast/dataset.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/metrics.hpp"
#include "kgcast/nn.hpp"
#include "kgcast/rng.hpp"

namespace kgcast {

namespace {

size_t find_slot(const std::string& name) {
  const auto& idx = feature_index();
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i].name == name) return i;
  }
  throw ValidationError("no feature slot named '" + name + "'");
}

void csv_double(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

std::vector<FeatureAuc> per_feature_auc(const FeatureMatrix& train_data, const FeatureMatrix& eval_data,
                                        const Hyperparameters& hp) {
  hp.validate();
  if (hp.kind != ModelKind::nn && hp.kind != ModelKind::logistic)
    throw ValidationError("per-feature scan trains network kinds only, got '" + model_kind_name(hp.kind) + "'");
  if (!train_data.has_labels() || !eval_data.has_labels())
    throw ValidationError("per-feature scan needs labeled train and eval matrices");
  if (train_data.layout_checksum != eval_data.layout_checksum)
    throw ValidationError("train and eval matrices disagree on the feature layout");

  const std::vector<uint32_t> train_rows = train_data.rows_with_role(RowRole::train);
  if (train_rows.empty()) throw ValidationError("per-feature scan found no rows with the train role");
  std::vector<uint8_t> y_train;
  y_train.reserve(train_rows.size());
  for (uint32_t r : train_rows) y_train.push_back(train_data.labels[r]);

  std::vector<uint8_t> y_eval(eval_data.labels);
  const size_t n_eval = eval_data.rows();

  MlpTrainConfig cfg;
  cfg.learning_rate = hp.learning_rate;
  cfg.batch_size = hp.batch_size;
  cfg.epochs = hp.epochs;

  std::vector<FeatureAuc> out;
  out.reserve(kNumFeatures);
  std::vector<double> col_train(train_rows.size()), col_eval(n_eval);
  for (size_t f = 0; f < kNumFeatures; ++f) {
    FeatureAuc row;
    row.index = int(f);
    row.name = feature_index()[f].name;

    for (size_t i = 0; i < train_rows.size(); ++i) col_train[i] = train_data.row(train_rows[i])[f];
    for (size_t i = 0; i < n_eval; ++i) col_eval[i] = eval_data.row(i)[f];

    StandardStats stats = standardize_fit(col_train.data(), col_train.size(), 1);
    if (stats.stdev[0] == 0.0) {
      row.auc_value = 0.5;  // a constant column cannot rank anything
      row.degenerate = true;
      out.push_back(std::move(row));
      continue;
    }
    std::vector<double> x_train = col_train, x_eval = col_eval;
    if (hp.standardize) {
      standardize_apply(x_train.data(), x_train.size(), 1, stats);
      standardize_apply(x_eval.data(), x_eval.size(), 1, stats);
    }

    cfg.seed = derive_seed(hp.seed, "feature-scan", uint64_t(f));
    MlpParams params = init_mlp(1, hp.hidden, cfg.seed);
    train_mlp(params, x_train.data(), y_train.data(), x_train.size(), nullptr, nullptr, 0, 1, cfg);
    row.auc_value = auc(mlp_predict(params, x_eval.data(), n_eval, 1), y_eval);
    out.push_back(std::move(row));
  }

  std::stable_sort(out.begin(), out.end(), [](const FeatureAuc& a, const FeatureAuc& b) {
    if (a.auc_value != b.auc_value) return a.auc_value > b.auc_value;
    return a.index < b.index;
  });
  return out;
}

void write_feature_auc_csv(const std::vector<FeatureAuc>& rows, std::ostream& out) {
  out << "feature_index,feature_name,auc,degenerate\n";
  for (const FeatureAuc& r : rows) {
    out << r.index << ',' << r.name << ',';
    csv_double(out, r.auc_value);
    out << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

namespace {

// Per-year artifacts shared across grid cells, built once on demand. A year
// that fails to build caches its error so every dependent cell reports it.
class GridCaches {
 public:
  GridCaches(const EvolvingGraph& graph, const GridSpec& spec) : graph_(graph), spec_(spec) {}

  const FeatureMatrix& matrix(int year) {
    auto it = matrices_.find(year);
    if (it == matrices_.end()) {
      try {
        SnapshotTrio trio = SnapshotTrio::build(graph_, year);
        std::vector<std::pair<int32_t, int32_t>> sample =
            sample_unconnected(trio.at(0), spec_.sample_size, derive_seed(spec_.seed, "grid-sample", uint64_t(year)));
        it = matrices_.emplace(year, make_feature_matrix(trio, std::move(sample), spec_.workers)).first;
      } catch (const std::exception& e) {
        errors_.emplace(year, e.what());
        throw;
      }
    }
    return it->second;
  }

  // Future citations for the year's sample over (year, year+delta],
  // thresholded later per cell.
  const std::vector<LabeledPair>& labeled(int year, int delta) {
    const auto key = std::make_pair(year, delta);
    auto it = labels_.find(key);
    if (it == labels_.end()) {
      it = labels_.emplace(key, label_pairs(graph_, matrix(year).pairs, year, delta, /*ir=*/1)).first;
    }
    return it->second;
  }

  // Re-throws a year's cached build failure without rebuilding.
  void check_year(int year) const {
    auto it = errors_.find(year);
    if (it != errors_.end()) throw ValidationError(it->second);
  }

 private:
  const EvolvingGraph& graph_;
  const GridSpec& spec_;
  std::map<int, FeatureMatrix> matrices_;
  std::map<std::pair<int, int>, std::vector<LabeledPair>> labels_;
  std::map<int, std::string> errors_;
};

}  // namespace

std::vector<BenchmarkCell> benchmark_grid(const EvolvingGraph& graph, const GridSpec& spec) {
  if (spec.models.empty() || spec.train_intervals.empty() || spec.eval_intervals.empty() || spec.irs.empty())
    throw ValidationError("benchmark grid needs at least one model, train interval, eval interval, and threshold");
  if (spec.sample_size == 0) throw ValidationError("benchmark grid needs a positive sample size");
  if (spec.min_positives < 1) throw ValidationError("minimum-positive guard must be at least 1");
  for (const Hyperparameters& hp : spec.models) hp.validate();

  const YearRange years = graph.years();
  auto check_interval = [&years](const Interval& iv, const char* which) {
    if (iv.start >= iv.end)
      throw ValidationError(std::string(which) + " interval needs start < end, got " + std::to_string(iv.start) +
                            ".." + std::to_string(iv.end));
    if (!years.contains(iv.start) || !years.contains(iv.end))
      throw ValidationError(std::string(which) + " interval " + std::to_string(iv.start) + ".." +
                            std::to_string(iv.end) + " lies outside corpus years " + std::to_string(years.first) +
                            ".." + std::to_string(years.last));
  };

  GridCaches caches(graph, spec);

  // Models trained lazily; under no_retrain the eval interval drops out of
  // the key and the seed, so horizons share one artifact.
  std::map<std::array<int64_t, 7>, std::shared_ptr<const ModelArtifact>> model_cache;
  std::map<std::string, std::string> model_errors;

  auto model_for = [&](size_t hp_idx, const Interval& train_iv, int64_t ir,
                       const Interval& eval_iv) -> std::shared_ptr<const ModelArtifact> {
    std::array<int64_t, 7> key = {int64_t(hp_idx), train_iv.start, train_iv.end, ir, 0, 0, 0};
    uint64_t seed = derive_seed(spec.seed, "grid-model", uint64_t(hp_idx));
    seed = derive_seed(seed, "train", uint64_t(uint32_t(train_iv.start)) << 16 | uint32_t(train_iv.end & 0xffff));
    seed = derive_seed(seed, "ir", uint64_t(ir));
    if (!spec.no_retrain) {
      key[4] = eval_iv.start;
      key[5] = eval_iv.end;
      key[6] = 1;
      seed = derive_seed(seed, "eval", uint64_t(uint32_t(eval_iv.start)) << 16 | uint32_t(eval_iv.end & 0xffff));
    }
    auto it = model_cache.find(key);
    if (it != model_cache.end()) return it->second;

    const FeatureMatrix& full = caches.matrix(train_iv.start);
    const std::vector<LabeledPair>& base = caches.labeled(train_iv.start, train_iv.end - train_iv.start);

    std::vector<LabeledPair> labeled = base;
    int64_t positives = 0;
    for (LabeledPair& p : labeled) {
      p.label = p.future_citations >= ir;
      positives += p.label ? 1 : 0;
    }
    if (positives < spec.min_positives) throw ValidationError("insufficient positives");

    SplitIndices split = balanced_build(labeled, derive_seed(seed, "balance"), spec.min_positives);
    std::vector<uint32_t> order = split.train;
    order.insert(order.end(), split.test.begin(), split.test.end());
    FeatureMatrix data = gather_rows(full, order);
    data.delta = train_iv.end - train_iv.start;
    data.ir = ir;
    data.seed = seed;
    data.future_citations.reserve(order.size());
    data.labels.reserve(order.size());
    data.roles.assign(order.size(), uint8_t(RowRole::test));
    for (size_t i = 0; i < order.size(); ++i) {
      data.future_citations.push_back(labeled[order[i]].future_citations);
      data.labels.push_back(labeled[order[i]].label ? 1 : 0);
      if (i < split.train.size()) data.roles[i] = uint8_t(RowRole::train);
    }

    Hyperparameters hp = spec.models[hp_idx];
    hp.seed = seed;
    auto model = std::make_shared<const ModelArtifact>(train_model(data, hp));
    model_cache.emplace(key, model);
    return model;
  };

  // Scores of one model over one year's whole sample, shared across the
  // horizons that only differ in the label window.
  std::map<std::pair<const ModelArtifact*, int>, std::shared_ptr<const std::vector<double>>> score_cache;
  auto scores_for = [&](const std::shared_ptr<const ModelArtifact>& model, int year) {
    const auto key = std::make_pair(model.get(), year);
    auto it = score_cache.find(key);
    if (it == score_cache.end()) {
      it = score_cache
               .emplace(key, std::make_shared<const std::vector<double>>(
                                 predict(*model, caches.matrix(year), spec.workers)))
               .first;
    }
    return it->second;
  };

  std::vector<BenchmarkCell> cells;
  for (size_t hp_idx = 0; hp_idx < spec.models.size(); ++hp_idx) {
    for (const Interval& train_iv : spec.train_intervals) {
      for (int64_t ir : spec.irs) {
        for (const Interval& eval_iv : spec.eval_intervals) {
          BenchmarkCell cell;
          cell.model = model_kind_name(spec.models[hp_idx].kind);
          cell.train = train_iv;
          cell.eval = eval_iv;
          cell.ir = ir;
          try {
            check_interval(train_iv, "train");
            check_interval(eval_iv, "eval");
            caches.check_year(train_iv.start);
            caches.check_year(eval_iv.start);

            auto model = model_for(hp_idx, train_iv, ir, eval_iv);

            const std::vector<LabeledPair>& base = caches.labeled(eval_iv.start, eval_iv.end - eval_iv.start);
            std::vector<uint8_t> labels(base.size());
            for (size_t i = 0; i < base.size(); ++i) {
              labels[i] = base[i].future_citations >= ir ? 1 : 0;
              cell.positives += labels[i];
            }
            cell.negatives = int64_t(labels.size()) - cell.positives;
            if (cell.positives < spec.min_positives) throw ValidationError("insufficient positives");
            if (cell.negatives == 0) throw ValidationError("insufficient negatives");

            cell.auc_value = auc(*scores_for(model, eval_iv.start), labels);
          } catch (const std::exception& e) {
            cell.skipped = true;
            cell.reason = e.what();
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

void write_grid_csv(const std::vector<BenchmarkCell>& cells, std::ostream& out) {
  out << "model,train_start,train_end,eval_start,eval_end,ir,auc,positives,negatives,status\n";
  for (const BenchmarkCell& c : cells) {
    out << c.model << ',' << c.train.start << ',' << c.train.end << ',' << c.eval.start << ',' << c.eval.end << ','
        << c.ir << ',';
    if (c.skipped) {
      out << ",,," << "skipped: " << c.reason << '\n';
    } else {
      csv_double(out, c.auc_value);
      out << ',' << c.positives << ',' << c.negatives << ",ok\n";
    }
  }
}

void write_explore_csv(const ConceptLexicon& lexicon, const FeatureMatrix& data, const std::vector<double>& scores,
                       std::ostream& out) {
  if (scores.size() != data.rows()) throw ValidationError("explore export needs one score per matrix row");
  static const size_t kNbU = find_slot("neighbors_u_y"), kNbV = find_slot("neighbors_v_y");
  static const size_t kNewU = find_slot("new_neighbors_1y_u"), kNewV = find_slot("new_neighbors_1y_v");
  static const size_t kCos = find_slot("cosine_y");
  static const size_t kDensity = find_slot("citation_sum_ratio_y");
  static const size_t kCtU = find_slot("total_citations_u_y"), kCtV = find_slot("total_citations_v_y");

  out << "concept_a,concept_b,score,cosine,mean_degree,mean_new_neighbors,citation_density,ct_a,ct_b\n";
  for (size_t i = 0; i < data.rows(); ++i) {
    const double* r = data.row(i);
    out << '"' << lexicon.entry(data.pairs[i].first).phrase << "\",\"" << lexicon.entry(data.pairs[i].second).phrase
        << "\",";
    csv_double(out, scores[i]);
    out << ',';
    csv_double(out, r[kCos]);
    out << ',';
    csv_double(out, (r[kNbU] + r[kNbV]) / 2.0);
    out << ',';
    csv_double(out, (r[kNewU] + r[kNewV]) / 2.0);
    out << ',';
    csv_double(out, r[kDensity]);
    out << ',';
    csv_double(out, r[kCtU]);
    out << ',';
    csv_double(out, r[kCtV]);
    out << '\n';
  }
}

}  // namespace kgcast
