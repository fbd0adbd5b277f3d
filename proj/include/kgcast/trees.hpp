#pragma once

#include <cstdint>
#include <vector>

namespace kgcast {

struct TreeNode {
  int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  double value = 0.0;  // leaf payload: class fraction (forest) or weight (boosted)
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(const double* row) const {
    int32_t at = 0;
    while (nodes[size_t(at)].feature >= 0) {
      const TreeNode& n = nodes[size_t(at)];
      at = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[size_t(at)].value;
  }
};

struct ForestConfig {
  int n_trees = 300;
  int min_split = 25;
  int min_leaf = 10;
  uint64_t seed = 0;
};

// Bagged gini trees with sqrt-of-features subsampling per node; leaves store
// the positive fraction, the ensemble score is the mean over trees.
std::vector<DecisionTree> train_forest(const double* x, const uint8_t* y, size_t rows, size_t cols,
                                       const ForestConfig& cfg);
double forest_predict_row(const std::vector<DecisionTree>& trees, const double* row);

struct BoostConfig {
  int rounds = 2000;
  double learning_rate = 0.01;
  int max_depth = 10;
  int min_leaf = 1;
};

struct BoostedModel {
  double base = 0.0;  // initial logit
  double learning_rate = 0.01;
  std::vector<DecisionTree> trees;  // leaves hold additive logit weights
};

// Additive trees on logistic loss: exact greedy splits on gradient/hessian
// sums with L2 weight regularization of 1, shrinkage = learning rate.
BoostedModel train_boosted(const double* x, const uint8_t* y, size_t rows, size_t cols, const BoostConfig& cfg);
double boosted_predict_row(const BoostedModel& model, const double* row);  // probability

}  // namespace kgcast
