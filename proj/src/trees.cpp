#include "kgcast/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgcast/errors.hpp"
#include "kgcast/rng.hpp"

namespace kgcast {

namespace {

struct Candidate {
  int32_t feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // improvement; <= 0 means "do not split"
};

// Shared recursive grower. The Criterion supplies per-row statistics and how
// to score a split / value a leaf, so gini bagging and gradient boosting use
// one tree builder.
template <typename Criterion>
class TreeBuilder {
 public:
  TreeBuilder(const double* x, size_t cols, const Criterion& crit, int min_split, int min_leaf, int max_depth,
              int features_per_node, Rng* rng)
      : x_(x), cols_(cols), crit_(crit), min_split_(min_split), min_leaf_(min_leaf), max_depth_(max_depth),
        features_per_node_(features_per_node), rng_(rng) {}

  DecisionTree grow(std::vector<uint32_t> rows) {
    DecisionTree tree;
    build(tree, std::move(rows), 0);
    return tree;
  }

 private:
  int32_t build(DecisionTree& tree, std::vector<uint32_t> rows, int depth) {
    const int32_t id = int32_t(tree.nodes.size());
    tree.nodes.emplace_back();

    Candidate best;
    if (int(rows.size()) >= min_split_ && (max_depth_ < 0 || depth < max_depth_) && !crit_.pure(rows)) {
      best = find_split(rows);
    }
    if (best.feature < 0) {
      tree.nodes[size_t(id)].value = crit_.leaf_value(rows);
      return id;
    }

    std::vector<uint32_t> left, right;
    for (uint32_t r : rows) {
      (x_[size_t(r) * cols_ + size_t(best.feature)] <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[size_t(id)].feature = best.feature;
    tree.nodes[size_t(id)].threshold = best.threshold;
    const int32_t l = build(tree, std::move(left), depth + 1);
    const int32_t r = build(tree, std::move(right), depth + 1);
    tree.nodes[size_t(id)].left = l;
    tree.nodes[size_t(id)].right = r;
    return id;
  }

  Candidate find_split(const std::vector<uint32_t>& rows) {
    std::vector<int32_t> features;
    if (features_per_node_ > 0 && size_t(features_per_node_) < cols_) {
      // Sample without replacement; keep the draw order for tie-breaking.
      std::vector<int32_t> all(cols_);
      std::iota(all.begin(), all.end(), 0);
      for (int i = 0; i < features_per_node_; ++i) {
        const size_t j = size_t(i) + size_t(rng_->below(uint64_t(all.size() - size_t(i))));
        std::swap(all[size_t(i)], all[j]);
        features.push_back(all[size_t(i)]);
      }
    } else {
      features.resize(cols_);
      std::iota(features.begin(), features.end(), 0);
    }

    Candidate best;
    std::vector<std::pair<double, uint32_t>> sorted;
    sorted.reserve(rows.size());
    for (int32_t f : features) {
      sorted.clear();
      for (uint32_t r : rows) sorted.emplace_back(x_[size_t(r) * cols_ + size_t(f)], r);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      crit_.begin_feature(rows);
      for (size_t i = 0; i + 1 < sorted.size(); ++i) {
        crit_.accumulate(sorted[i].second);
        if (sorted[i].first == sorted[i + 1].first) continue;  // not a boundary
        const size_t n_left = i + 1, n_right = sorted.size() - n_left;
        if (n_left < size_t(min_leaf_) || n_right < size_t(min_leaf_)) continue;
        const double score = crit_.split_score();
        if (score > best.score) {
          best.feature = f;
          best.threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
          best.score = score;
        }
      }
    }
    return best;
  }

  const double* x_;
  size_t cols_;
  Criterion crit_;
  int min_split_, min_leaf_, max_depth_, features_per_node_;
  Rng* rng_;
};

// Gini impurity decrease for binary labels.
struct GiniCriterion {
  const uint8_t* y;

  // Node totals, set per find_split call via begin_feature; accumulate moves
  // rows into the left partition one at a time.
  mutable double n = 0, pos = 0, n_left = 0, pos_left = 0;

  bool pure(const std::vector<uint32_t>& rows) const {
    size_t p = 0;
    for (uint32_t r : rows) p += y[r];
    return p == 0 || p == rows.size();
  }

  double leaf_value(const std::vector<uint32_t>& rows) const {
    size_t p = 0;
    for (uint32_t r : rows) p += y[r];
    return double(p) / double(rows.size());
  }

  void begin_feature(const std::vector<uint32_t>& rows) const {
    n = double(rows.size());
    pos = 0;
    for (uint32_t r : rows) pos += y[r];
    n_left = 0;
    pos_left = 0;
  }

  void accumulate(uint32_t row) const {
    n_left += 1;
    pos_left += y[row];
  }

  double split_score() const {
    auto gini = [](double p, double total) {
      if (total == 0) return 0.0;
      const double q = p / total;
      return 2.0 * q * (1.0 - q);
    };
    const double n_right = n - n_left;
    const double parent = gini(pos, n);
    const double child = (n_left * gini(pos_left, n_left) + n_right * gini(pos - pos_left, n_right)) / n;
    return parent - child;
  }
};

// XGBoost-style gain on gradient/hessian sums, lambda = 1.
struct GradientCriterion {
  const double* grad;
  const double* hess;
  static constexpr double kLambda = 1.0;

  mutable double g = 0, h = 0, g_left = 0, h_left = 0;

  bool pure(const std::vector<uint32_t>&) const { return false; }  // gain test decides

  double leaf_value(const std::vector<uint32_t>& rows) const {
    double gs = 0, hs = 0;
    for (uint32_t r : rows) {
      gs += grad[r];
      hs += hess[r];
    }
    return -gs / (hs + kLambda);
  }

  void begin_feature(const std::vector<uint32_t>& rows) const {
    g = 0;
    h = 0;
    for (uint32_t r : rows) {
      g += grad[r];
      h += hess[r];
    }
    g_left = 0;
    h_left = 0;
  }

  void accumulate(uint32_t row) const {
    g_left += grad[row];
    h_left += hess[row];
  }

  double split_score() const {
    auto term = [](double gs, double hs) { return gs * gs / (hs + kLambda); };
    return 0.5 * (term(g_left, h_left) + term(g - g_left, h - h_left) - term(g, h));
  }
};

void check_two_classes(const uint8_t* y, size_t rows) {
  size_t pos = 0;
  for (size_t i = 0; i < rows; ++i) pos += y[i];
  if (pos == 0 || pos == rows)
    throw ValidationError("tree training needs both classes, got " + std::to_string(pos) + "/" +
                          std::to_string(rows) + " positives");
}

}  // namespace

std::vector<DecisionTree> train_forest(const double* x, const uint8_t* y, size_t rows, size_t cols,
                                       const ForestConfig& cfg) {
  if (rows == 0) throw ValidationError("cannot train a forest on an empty set");
  check_two_classes(y, rows);
  if (cfg.n_trees < 1) throw ValidationError("forest needs at least one tree");

  const int features_per_node = int(std::ceil(std::sqrt(double(cols))));
  std::vector<DecisionTree> trees;
  trees.reserve(size_t(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, "forest-tree", uint64_t(t)));
    std::vector<uint32_t> bootstrap(rows);
    for (uint32_t& r : bootstrap) r = uint32_t(rng.below(rows));
    GiniCriterion crit{y};
    TreeBuilder<GiniCriterion> builder(x, cols, crit, cfg.min_split, cfg.min_leaf, /*max_depth=*/-1,
                                       features_per_node, &rng);
    trees.push_back(builder.grow(std::move(bootstrap)));
  }
  return trees;
}

double forest_predict_row(const std::vector<DecisionTree>& trees, const double* row) {
  double sum = 0;
  for (const DecisionTree& t : trees) sum += t.predict_row(row);
  return sum / double(trees.size());
}

BoostedModel train_boosted(const double* x, const uint8_t* y, size_t rows, size_t cols, const BoostConfig& cfg) {
  if (rows == 0) throw ValidationError("cannot train boosted trees on an empty set");
  check_two_classes(y, rows);
  if (cfg.rounds < 1) throw ValidationError("boosting needs at least one round");

  BoostedModel model;
  model.learning_rate = cfg.learning_rate;
  model.base = 0.0;  // balanced training sets make the 0.5-probability start exact

  std::vector<double> logit(rows, model.base), grad(rows), hess(rows);
  std::vector<uint32_t> all(rows);
  std::iota(all.begin(), all.end(), 0);

  for (int round = 0; round < cfg.rounds; ++round) {
    for (size_t i = 0; i < rows; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-logit[i]));
      grad[i] = p - double(y[i]);
      hess[i] = p * (1.0 - p);
    }
    GradientCriterion crit{grad.data(), hess.data()};
    TreeBuilder<GradientCriterion> builder(x, cols, crit, /*min_split=*/2 * cfg.min_leaf, cfg.min_leaf,
                                           cfg.max_depth, /*features_per_node=*/0, nullptr);
    DecisionTree tree = builder.grow(all);
    for (size_t i = 0; i < rows; ++i) {
      logit[i] += cfg.learning_rate * tree.predict_row(x + i * cols);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double boosted_predict_row(const BoostedModel& model, const double* row) {
  double z = model.base;
  for (const DecisionTree& t : model.trees) z += model.learning_rate * t.predict_row(row);
  return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace kgcast
