#pragma once

#include <cstdint>
#include <vector>

namespace kgcast {

// Fully connected ReLU network with a single sigmoid output, float32
// arithmetic. Weights are row-major (outputs x inputs) per layer.
struct MlpParams {
  std::vector<int> dims;  // e.g. {141, 600, 600, 600, 600, 1}
  std::vector<std::vector<float>> weights;
  std::vector<std::vector<float>> biases;

  bool operator==(const MlpParams&) const = default;
};

// Uniform fan-in initialization, deterministic in seed.
MlpParams init_mlp(int inputs, const std::vector<int>& hidden, uint64_t seed);

// Scores in (0,1), one per row.
std::vector<double> mlp_predict(const MlpParams& params, const double* x, size_t rows, size_t cols);

struct MlpTrainConfig {
  double learning_rate = 3e-5;
  int batch_size = 1000;
  int epochs = 50;
  uint64_t seed = 0;
};

struct TrainCurves {
  std::vector<double> train_loss;
  std::vector<double> test_loss;  // mirrors train_loss when there is no test set
  int best_epoch = 0;             // 0-based epoch whose parameters were kept
};

// Adam on binary cross-entropy over balanced half-positive batches. Keeps the
// parameters from the epoch with the best test loss. Deterministic given
// seed. Throws with epoch/batch/parameter-norm diagnostics when the loss
// turns non-finite.
TrainCurves train_mlp(MlpParams& params, const double* train_x, const uint8_t* train_y, size_t n_train,
                      const double* test_x, const uint8_t* test_y, size_t n_test, size_t cols,
                      const MlpTrainConfig& cfg);

}  // namespace kgcast
