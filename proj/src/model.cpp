#include "kgcast/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "kgcast/binio.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/hash.hpp"

namespace kgcast {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'M', 'O', 'D', 'E', 'L', '1'};
constexpr uint32_t kVersion = 1;

const char* kKindNames[] = {"logistic", "nn", "forest", "boosted", "transformer"};

double clamped_bce(const std::vector<double>& p, const uint8_t* y) {
  constexpr double eps = 1e-7;
  double sum = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], eps, 1.0 - eps);
    sum += y[i] ? -std::log(q) : -std::log(1.0 - q);
  }
  return p.empty() ? 0.0 : sum / double(p.size());
}

// Gathers the rows with a role into a dense block plus labels.
struct DenseSplit {
  std::vector<double> x;
  std::vector<uint8_t> y;
  size_t rows = 0;
};

DenseSplit gather(const FeatureMatrix& data, RowRole role) {
  DenseSplit out;
  for (uint32_t r : data.rows_with_role(role)) {
    const double* row = data.row(r);
    out.x.insert(out.x.end(), row, row + kNumFeatures);
    out.y.push_back(data.labels[r]);
    ++out.rows;
  }
  return out;
}

// Loss trajectory of an additive ensemble, evaluated after each stage. The
// combine callback folds one tree into the running per-row accumulator and
// returns the resulting probabilities.
template <typename Step>
void ensemble_curves(size_t n_stages, const DenseSplit& train, const DenseSplit& test, TrainMeta& meta, Step step) {
  std::vector<double> acc_train(train.rows, 0.0), acc_test(test.rows, 0.0);
  std::vector<double> p_train(train.rows), p_test(test.rows);
  for (size_t s = 0; s < n_stages; ++s) {
    step(s, train, acc_train, p_train);
    step(s, test, acc_test, p_test);
    meta.train_loss.push_back(clamped_bce(p_train, train.y.data()));
    meta.test_loss.push_back(test.rows ? clamped_bce(p_test, test.y.data())
                                       : meta.train_loss.back());
  }
  if (!meta.test_loss.empty()) {
    meta.best_epoch =
        int(std::min_element(meta.test_loss.begin(), meta.test_loss.end()) - meta.test_loss.begin());
  }
}

void write_trees(std::ostream& os, const std::vector<DecisionTree>& trees) {
  write_le<uint64_t>(os, trees.size());
  for (const DecisionTree& t : trees) {
    write_le<uint64_t>(os, t.nodes.size());
    for (const TreeNode& n : t.nodes) {
      write_le<int32_t>(os, n.feature);
      write_le<double>(os, n.threshold);
      write_le<int32_t>(os, n.left);
      write_le<int32_t>(os, n.right);
      write_le<double>(os, n.value);
    }
  }
}

std::vector<DecisionTree> read_trees(std::istream& is) {
  std::vector<DecisionTree> trees(read_le<uint64_t>(is));
  for (DecisionTree& t : trees) {
    t.nodes.resize(read_le<uint64_t>(is));
    for (TreeNode& n : t.nodes) {
      n.feature = read_le<int32_t>(is);
      n.threshold = read_le<double>(is);
      n.left = read_le<int32_t>(is);
      n.right = read_le<int32_t>(is);
      n.value = read_le<double>(is);
      if (n.feature >= kNumFeatures || (n.feature >= 0 && (n.left < 0 || n.right < 0)))
        throw IntegrityError("model file holds a malformed tree node");
    }
  }
  return trees;
}

void write_doubles(std::ostream& os, const std::vector<double>& v) {
  write_le<uint64_t>(os, v.size());
  for (double d : v) write_le<double>(os, d);
}

std::vector<double> read_doubles(std::istream& is) {
  std::vector<double> v(read_le<uint64_t>(is));
  for (double& d : v) d = read_le<double>(is);
  return v;
}

// Scores a contiguous row range with whichever payload the model carries.
// `x` is already standardized.
void score_block(const ModelArtifact& model, const double* x, size_t rows, double* out) {
  switch (model.hp.kind) {
    case ModelKind::nn:
    case ModelKind::logistic: {
      std::vector<double> p = mlp_predict(model.mlp, x, rows, kNumFeatures);
      std::copy(p.begin(), p.end(), out);
      return;
    }
    case ModelKind::forest:
      for (size_t i = 0; i < rows; ++i) out[i] = forest_predict_row(model.forest, x + i * kNumFeatures);
      return;
    case ModelKind::boosted:
      for (size_t i = 0; i < rows; ++i) out[i] = boosted_predict_row(model.boosted, x + i * kNumFeatures);
      return;
    case ModelKind::transformer:
      break;
  }
  throw ValidationError("model kind '" + model_kind_name(model.hp.kind) + "' cannot score rows");
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
  const auto i = size_t(kind);
  if (i >= std::size(kKindNames)) throw ValidationError("unknown model kind tag " + std::to_string(i));
  return kKindNames[i];
}

ModelKind parse_model_kind(const std::string& name) {
  for (size_t i = 0; i < std::size(kKindNames); ++i) {
    if (name == kKindNames[i]) return ModelKind(i);
  }
  throw ValidationError("unknown model kind '" + name + "' (expected logistic|nn|forest|boosted)");
}

Hyperparameters Hyperparameters::defaults_for(ModelKind kind) {
  Hyperparameters hp;
  hp.kind = kind;
  switch (kind) {
    case ModelKind::nn:
      break;  // struct defaults are the main network
    case ModelKind::logistic:
      hp.hidden.clear();
      hp.learning_rate = 1e-2;  // plain logistic converges fine at a larger step
      break;
    case ModelKind::forest:
    case ModelKind::boosted:
      hp.standardize = false;  // splits are scale-free
      break;
    case ModelKind::transformer:
      break;
  }
  return hp;
}

Hyperparameters Hyperparameters::benchmark_nn() {
  Hyperparameters hp;
  hp.kind = ModelKind::nn;
  hp.hidden = {600, 600, 600};
  hp.batch_size = 2048;
  hp.learning_rate = 1e-4;
  return hp;
}

void Hyperparameters::validate() const {
  auto positive = [](long long v, const char* what) {
    if (v <= 0) throw ValidationError(std::string(what) + " must be positive, got " + std::to_string(v));
  };
  for (int h : hidden) positive(h, "hidden layer width");
  if (!(learning_rate > 0)) throw ValidationError("learning rate must be positive");
  positive(batch_size, "batch size");
  positive(epochs, "epochs");
  positive(n_trees, "tree count");
  positive(min_split, "min-split");
  positive(min_leaf, "min-leaf");
  positive(rounds, "boosting rounds");
  positive(max_depth, "max depth");
  if (activation != "relu")
    throw ValidationError("unsupported activation '" + activation + "' (only relu is implemented)");
}

nlohmann::json Hyperparameters::to_json() const {
  return nlohmann::json{{"kind", model_kind_name(kind)},
                        {"hidden", hidden},
                        {"activation", activation},
                        {"learning_rate", learning_rate},
                        {"batch_size", batch_size},
                        {"epochs", epochs},
                        {"seed", seed},
                        {"n_trees", n_trees},
                        {"min_split", min_split},
                        {"min_leaf", min_leaf},
                        {"rounds", rounds},
                        {"max_depth", max_depth},
                        {"standardize", standardize}};
}

Hyperparameters Hyperparameters::from_json(const nlohmann::json& j) {
  Hyperparameters hp = defaults_for(parse_model_kind(j.at("kind").get<std::string>()));
  auto opt = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  opt("hidden", hp.hidden);
  opt("activation", hp.activation);
  opt("learning_rate", hp.learning_rate);
  opt("batch_size", hp.batch_size);
  opt("epochs", hp.epochs);
  opt("seed", hp.seed);
  opt("n_trees", hp.n_trees);
  opt("min_split", hp.min_split);
  opt("min_leaf", hp.min_leaf);
  opt("rounds", hp.rounds);
  opt("max_depth", hp.max_depth);
  opt("standardize", hp.standardize);
  return hp;
}

ModelArtifact train_model(const FeatureMatrix& data, const Hyperparameters& hp) {
  hp.validate();
  if (!data.has_labels()) throw ValidationError("training needs a labeled dataset, got a plain feature matrix");
  if (data.layout_checksum != feature_layout_checksum())
    throw ValidationError("dataset feature layout " + checksum_hex(data.layout_checksum) +
                          " does not match this build's " + checksum_hex(feature_layout_checksum()));
  if (hp.kind == ModelKind::transformer)
    throw ValidationError("model kind 'transformer' is reserved but not implemented");

  DenseSplit train = gather(data, RowRole::train);
  DenseSplit test = gather(data, RowRole::test);
  if (train.rows == 0) throw ValidationError("dataset has no rows with the train role");

  ModelArtifact model;
  model.hp = hp;
  model.layout_checksum = data.layout_checksum;
  model.meta.year = data.year;
  model.meta.delta = data.delta;
  model.meta.ir = data.ir;
  model.meta.dataset_seed = data.seed;

  if (hp.standardize) {
    model.stats = standardize_fit(train.x.data(), train.rows, kNumFeatures);
    standardize_apply(train.x.data(), train.rows, kNumFeatures, model.stats);
    standardize_apply(test.x.data(), test.rows, kNumFeatures, model.stats);
  }

  switch (hp.kind) {
    case ModelKind::nn:
    case ModelKind::logistic: {
      model.mlp = init_mlp(kNumFeatures, hp.hidden, hp.seed);
      MlpTrainConfig cfg;
      cfg.learning_rate = hp.learning_rate;
      cfg.batch_size = hp.batch_size;
      cfg.epochs = hp.epochs;
      cfg.seed = hp.seed;
      TrainCurves curves = train_mlp(model.mlp, train.x.data(), train.y.data(), train.rows, test.x.data(),
                                     test.y.data(), test.rows, kNumFeatures, cfg);
      model.meta.train_loss = std::move(curves.train_loss);
      model.meta.test_loss = std::move(curves.test_loss);
      model.meta.best_epoch = curves.best_epoch;
      break;
    }
    case ModelKind::forest: {
      ForestConfig cfg{hp.n_trees, hp.min_split, hp.min_leaf, hp.seed};
      model.forest = train_forest(train.x.data(), train.y.data(), train.rows, kNumFeatures, cfg);
      // Curve entry t = loss of the mean over the first t+1 trees.
      ensemble_curves(model.forest.size(), train, test, model.meta,
                      [&](size_t t, const DenseSplit& split, std::vector<double>& acc, std::vector<double>& p) {
                        for (size_t i = 0; i < split.rows; ++i) {
                          acc[i] += model.forest[t].predict_row(split.x.data() + i * kNumFeatures);
                          p[i] = acc[i] / double(t + 1);
                        }
                      });
      break;
    }
    case ModelKind::boosted: {
      BoostConfig cfg{hp.rounds, hp.learning_rate, hp.max_depth, hp.min_leaf};
      model.boosted = train_boosted(train.x.data(), train.y.data(), train.rows, kNumFeatures, cfg);
      ensemble_curves(model.boosted.trees.size(), train, test, model.meta,
                      [&](size_t t, const DenseSplit& split, std::vector<double>& acc, std::vector<double>& p) {
                        for (size_t i = 0; i < split.rows; ++i) {
                          acc[i] += model.boosted.learning_rate *
                                    model.boosted.trees[t].predict_row(split.x.data() + i * kNumFeatures);
                          p[i] = 1.0 / (1.0 + std::exp(-(model.boosted.base + acc[i])));
                        }
                      });
      break;
    }
    case ModelKind::transformer:
      break;  // rejected above
  }
  return model;
}

std::vector<double> predict_rows(const ModelArtifact& model, const double* x, size_t rows, int workers) {
  if (rows == 0) return {};
  std::vector<double> standardized(x, x + rows * kNumFeatures);
  if (!model.stats.empty()) standardize_apply(standardized.data(), rows, kNumFeatures, model.stats);

  std::vector<double> scores(rows);
  const size_t n_workers = std::max<size_t>(1, std::min<size_t>(size_t(std::max(1, workers)), rows));
  if (n_workers == 1) {
    score_block(model, standardized.data(), rows, scores.data());
    return scores;
  }
  std::vector<std::thread> pool;
  const size_t per = (rows + n_workers - 1) / n_workers;
  for (size_t w = 0; w < n_workers; ++w) {
    const size_t begin = w * per, end = std::min(rows, begin + per);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      score_block(model, standardized.data() + begin * kNumFeatures, end - begin, scores.data() + begin);
    });
  }
  for (std::thread& t : pool) t.join();
  return scores;
}

std::vector<double> predict(const ModelArtifact& model, const FeatureMatrix& data, int workers) {
  if (data.layout_checksum != model.layout_checksum)
    throw ValidationError("matrix feature layout " + checksum_hex(data.layout_checksum) +
                          " does not match the model's " + checksum_hex(model.layout_checksum));
  return predict_rows(model, data.values.data(), data.rows(), workers);
}

void relabel_matrix(FeatureMatrix& data, int64_t ir) {
  if (!data.has_labels()) throw ValidationError("cannot relabel a matrix without a label block");
  if (ir < 1) throw ValidationError("citation threshold must be at least 1, got " + std::to_string(ir));
  for (size_t i = 0; i < data.labels.size(); ++i) data.labels[i] = data.future_citations[i] >= ir ? 1 : 0;
  data.ir = ir;
}

void ModelArtifact::save(const std::filesystem::path& path, const ArtifactMeta& artifact_meta) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open model file for writing: " + path.string());
  ArtifactMeta header_meta = artifact_meta;
  header_meta.params["hyperparameters"] = hp.to_json();
  write_artifact_header(os, kMagic, kVersion, header_meta);

  write_string(os, hp.to_json().dump());
  write_le<uint64_t>(os, layout_checksum);
  write_doubles(os, stats.mean);
  write_doubles(os, stats.stdev);

  write_le<int32_t>(os, meta.year);
  write_le<int32_t>(os, meta.delta);
  write_le<int64_t>(os, meta.ir);
  write_le<uint64_t>(os, meta.dataset_seed);
  write_le<int32_t>(os, meta.best_epoch);
  write_doubles(os, meta.train_loss);
  write_doubles(os, meta.test_loss);

  switch (hp.kind) {
    case ModelKind::nn:
    case ModelKind::logistic: {
      write_le<uint64_t>(os, mlp.dims.size());
      for (int d : mlp.dims) write_le<int32_t>(os, d);
      for (size_t l = 0; l < mlp.weights.size(); ++l) {
        write_le<uint64_t>(os, mlp.weights[l].size());
        for (float f : mlp.weights[l]) write_le<float>(os, f);
        write_le<uint64_t>(os, mlp.biases[l].size());
        for (float f : mlp.biases[l]) write_le<float>(os, f);
      }
      break;
    }
    case ModelKind::forest:
      write_trees(os, forest);
      break;
    case ModelKind::boosted:
      write_le<double>(os, boosted.base);
      write_le<double>(os, boosted.learning_rate);
      write_trees(os, boosted.trees);
      break;
    case ModelKind::transformer:
      throw ValidationError("model kind 'transformer' has no payload to save");
  }
  if (!os) throw ValidationError("failed writing model file: " + path.string());
}

ModelArtifact ModelArtifact::load(const std::filesystem::path& path, ArtifactMeta* meta_out,
                                  std::optional<ModelKind> expect) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open model file: " + path.string());
  auto [version, meta] = read_artifact_header(is, kMagic, kVersion);
  (void)version;
  if (meta_out) *meta_out = meta;

  ModelArtifact model;
  try {
    model.hp = Hyperparameters::from_json(nlohmann::json::parse(read_string(is)));
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError("model file " + path.string() + " holds bad hyperparameter JSON: " + e.what());
  }
  if (expect && *expect != model.hp.kind)
    throw IntegrityError("model file " + path.string() + " holds a '" + model_kind_name(model.hp.kind) +
                         "' model, expected '" + model_kind_name(*expect) + "'");

  model.layout_checksum = read_le<uint64_t>(is);
  model.stats.mean = read_doubles(is);
  model.stats.stdev = read_doubles(is);
  if (model.stats.mean.size() != model.stats.stdev.size())
    throw IntegrityError("model file holds mismatched standardization vectors");

  model.meta.year = read_le<int32_t>(is);
  model.meta.delta = read_le<int32_t>(is);
  model.meta.ir = read_le<int64_t>(is);
  model.meta.dataset_seed = read_le<uint64_t>(is);
  model.meta.best_epoch = read_le<int32_t>(is);
  model.meta.train_loss = read_doubles(is);
  model.meta.test_loss = read_doubles(is);

  switch (model.hp.kind) {
    case ModelKind::nn:
    case ModelKind::logistic: {
      model.mlp.dims.resize(read_le<uint64_t>(is));
      for (int& d : model.mlp.dims) d = read_le<int32_t>(is);
      if (model.mlp.dims.size() < 2 || model.mlp.dims.front() != kNumFeatures || model.mlp.dims.back() != 1)
        throw IntegrityError("model file holds malformed network dimensions");
      const size_t layers = model.mlp.dims.size() - 1;
      model.mlp.weights.resize(layers);
      model.mlp.biases.resize(layers);
      for (size_t l = 0; l < layers; ++l) {
        model.mlp.weights[l].resize(read_le<uint64_t>(is));
        for (float& f : model.mlp.weights[l]) f = read_le<float>(is);
        model.mlp.biases[l].resize(read_le<uint64_t>(is));
        for (float& f : model.mlp.biases[l]) f = read_le<float>(is);
        const size_t want_w = size_t(model.mlp.dims[l]) * size_t(model.mlp.dims[l + 1]);
        if (model.mlp.weights[l].size() != want_w || model.mlp.biases[l].size() != size_t(model.mlp.dims[l + 1]))
          throw IntegrityError("model file holds a layer with inconsistent parameter counts");
      }
      break;
    }
    case ModelKind::forest:
      model.forest = read_trees(is);
      break;
    case ModelKind::boosted:
      model.boosted.base = read_le<double>(is);
      model.boosted.learning_rate = read_le<double>(is);
      model.boosted.trees = read_trees(is);
      break;
    case ModelKind::transformer:
      throw IntegrityError("model file declares the reserved 'transformer' kind");
  }
  if (!is) throw IntegrityError("model file is truncated: " + path.string());
  return model;
}

void export_loss_csv(const ModelArtifact& model, std::ostream& out) {
  out << "epoch,train_loss,test_loss\n";
  char buf[64];
  for (size_t i = 0; i < model.meta.train_loss.size(); ++i) {
    out << (i + 1) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", model.meta.train_loss[i]);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", model.meta.test_loss[i]);
    out << buf << '\n';
  }
}

}  // namespace kgcast
