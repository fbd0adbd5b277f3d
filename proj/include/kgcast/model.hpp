#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgcast/artifact.hpp"
#include "kgcast/dataset.hpp"
#include "kgcast/matrix.hpp"
#include "kgcast/nn.hpp"
#include "kgcast/trees.hpp"

namespace kgcast {

// "transformer" is a reserved tag only: parsing and artifact plumbing accept
// it, training rejects it.
enum class ModelKind : uint8_t { logistic = 0, nn = 1, forest = 2, boosted = 3, transformer = 4 };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct Hyperparameters {
  ModelKind kind = ModelKind::nn;
  std::vector<int> hidden = {600, 600, 600, 600};
  std::string activation = "relu";
  double learning_rate = 3e-5;
  int batch_size = 1000;
  int epochs = 50;
  uint64_t seed = 0;
  int n_trees = 300;
  int min_split = 25;
  int min_leaf = 10;
  int rounds = 2000;
  int max_depth = 10;
  bool standardize = true;  // on for nn/logistic, off for tree kinds

  static Hyperparameters defaults_for(ModelKind kind);
  // The benchmark-grid network: 3 x 600, batch 2048, learning rate 1e-4.
  static Hyperparameters benchmark_nn();

  void validate() const;  // positive counts, known activation
  nlohmann::json to_json() const;
  static Hyperparameters from_json(const nlohmann::json& j);

  bool operator==(const Hyperparameters&) const = default;
};

// Provenance of one training run, stored inside the artifact.
struct TrainMeta {
  int year = 0;
  int delta = 0;
  int64_t ir = 0;
  uint64_t dataset_seed = 0;
  std::vector<double> train_loss;  // per epoch (nn/logistic), per round (boosted), per tree (forest)
  std::vector<double> test_loss;
  int best_epoch = 0;  // 0-based argmin of test_loss; nn/logistic restore it, ensembles keep all stages
};

struct ModelArtifact {
  Hyperparameters hp;
  uint64_t layout_checksum = 0;
  StandardStats stats;  // empty when hp.standardize is false
  TrainMeta meta;

  // Exactly one payload is populated, selected by hp.kind.
  MlpParams mlp;
  std::vector<DecisionTree> forest;
  BoostedModel boosted;

  void save(const std::filesystem::path& path, const ArtifactMeta& artifact_meta) const;
  // `expect` turns a wrong-kind file into an IntegrityError instead of a
  // silently different model.
  static ModelArtifact load(const std::filesystem::path& path, ArtifactMeta* meta_out = nullptr,
                            std::optional<ModelKind> expect = std::nullopt);
};

// Trains hp.kind on the matrix's train rows, tracking loss on its test rows.
// The matrix must carry labels and the current feature layout.
ModelArtifact train_model(const FeatureMatrix& data, const Hyperparameters& hp);

// Scores rows in input order, standardizing per the artifact first. `x` is
// raw (unstandardized) feature rows, kNumFeatures wide. Shards across
// workers with deterministic output.
std::vector<double> predict_rows(const ModelArtifact& model, const double* x, size_t rows, int workers = 1);

// Same, validating the matrix's layout checksum against the model's (error
// names both) before scoring every row.
std::vector<double> predict(const ModelArtifact& model, const FeatureMatrix& data, int workers = 1);

// Evaluation-side relabeling for cross-threshold runs: label becomes
// future_citations >= ir, nothing else changes.
void relabel_matrix(FeatureMatrix& data, int64_t ir);

// CSV "epoch,train_loss,test_loss", epochs numbered from 1.
void export_loss_csv(const ModelArtifact& model, std::ostream& out);

}  // namespace kgcast
