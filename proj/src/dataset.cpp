#include "kgcast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"

namespace kgcast {

namespace {

// Unordered pairs (u < v) of n vertices, indexed lexicographically:
// index(u,v) = offset(u) + (v - u - 1), offset(u) = u*n - u*(u+1)/2.
std::pair<int32_t, int32_t> decode_pair(int64_t index, int64_t n) {
  int64_t u = 0, lo = 0, hi = n - 1;
  // offset(u) is increasing; binary-search the row.
  while (lo < hi) {
    int64_t mid = (lo + hi + 1) / 2;
    int64_t off = mid * n - mid * (mid + 1) / 2;
    if (off <= index) lo = mid;
    else hi = mid - 1;
  }
  u = lo;
  int64_t off = u * n - u * (u + 1) / 2;
  int64_t v = u + 1 + (index - off);
  return {int32_t(u), int32_t(v)};
}

void shuffle(std::vector<uint32_t>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[size_t(rng.below(i))]);
}

}  // namespace

std::vector<std::pair<int32_t, int32_t>> sample_unconnected(const GraphSnapshot& snapshot, uint64_t count,
                                                            uint64_t seed) {
  const int64_t n = snapshot.num_vertices();
  const int64_t all = n * (n - 1) / 2;
  const int64_t population = all - snapshot.num_edges();
  if (int64_t(count) > population) {
    throw ValidationError("requested " + std::to_string(count) + " unconnected pairs but only " +
                          std::to_string(population) + " exist");
  }

  std::vector<std::pair<int32_t, int32_t>> out;
  out.reserve(count);
  Rng rng(seed);

  if (int64_t(count) * 2 > population) {
    // Dense regime: enumerate and take a partial Fisher-Yates prefix.
    std::vector<std::pair<int32_t, int32_t>> pool;
    pool.reserve(size_t(population));
    for (int32_t u = 0; u < n; ++u) {
      auto nb = snapshot.neighbors(u);
      size_t k = 0;
      while (k < nb.size() && nb[k] <= u) ++k;  // skip neighbors <= u
      for (int32_t v = u + 1; v < n; ++v) {
        if (k < nb.size() && nb[k] == v) {
          ++k;
          continue;
        }
        pool.emplace_back(u, v);
      }
    }
    for (uint64_t i = 0; i < count; ++i) {
      const uint64_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  std::unordered_set<uint64_t> chosen;
  chosen.reserve(size_t(count) * 2);
  while (out.size() < count) {
    const int64_t idx = int64_t(rng.below(uint64_t(all)));
    auto [u, v] = decode_pair(idx, n);
    if (snapshot.connected(u, v)) continue;
    if (!chosen.insert(pair_key(u, v)).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

std::vector<LabeledPair> label_pairs(const EvolvingGraph& graph, const std::vector<std::pair<int32_t, int32_t>>& pairs,
                                     int y, int delta, int64_t ir) {
  if (delta < 1) throw ValidationError("label horizon delta must be at least 1 year");
  std::vector<LabeledPair> out;
  out.reserve(pairs.size());
  for (auto& [u, v] : pairs) {
    const int64_t c = graph.pair_citations_in_window(u, v, y, y + delta);
    out.push_back({u, v, c, c >= ir});
  }
  return out;
}

std::vector<LabeledPair> conditioned_pairs(const EvolvingGraph& graph, int y, int delta, int64_t low, int64_t high) {
  if (low >= high) throw ValidationError("conditioning band needs low < high");
  GraphSnapshot at_y = GraphSnapshot::build(graph, year_end_day(y));
  GraphSnapshot at_end = GraphSnapshot::build(graph, year_end_day(y + delta));

  std::vector<LabeledPair> out;
  size_t n_pos = 0, n_neg = 0;
  for (int32_t u = 0; u < at_end.num_vertices(); ++u) {
    for (int32_t v : at_end.neighbors(u)) {
      if (v <= u) continue;
      if (at_y.connected(u, v)) continue;  // must be new within the horizon
      const int64_t c = graph.pair_citations_in_window(u, v, y, y + delta);
      if (c > low && c < high) continue;  // band gap excluded
      const bool label = c >= high;
      (label ? n_pos : n_neg) += 1;
      out.push_back({u, v, c, label});
    }
  }
  if (n_pos == 0) throw ValidationError("conditioned dataset has no positive pairs (citations >= " +
                                        std::to_string(high) + ")");
  if (n_neg == 0) throw ValidationError("conditioned dataset has no negative pairs (citations <= " +
                                        std::to_string(low) + ")");
  return out;
}

SplitIndices balanced_build(const std::vector<LabeledPair>& labeled, uint64_t seed, int64_t min_positives) {
  std::vector<uint32_t> pos, neg;
  for (uint32_t i = 0; i < labeled.size(); ++i) (labeled[i].label ? pos : neg).push_back(i);

  if (int64_t(pos.size()) < min_positives) {
    throw ValidationError("insufficient positives: " + std::to_string(pos.size()) + " found, need at least " +
                          std::to_string(min_positives));
  }
  if (neg.size() < pos.size()) {
    throw ValidationError("insufficient negatives: " + std::to_string(neg.size()) + " for " +
                          std::to_string(pos.size()) + " positives");
  }

  Rng rng(seed);
  shuffle(pos, rng);
  // Equal-count negative sample, uniform without replacement.
  shuffle(neg, rng);
  neg.resize(pos.size());

  const size_t n_train = size_t(std::llround(0.85 * double(pos.size())));
  SplitIndices split;
  auto take = [&](const std::vector<uint32_t>& src) {
    for (size_t i = 0; i < src.size(); ++i) (i < n_train ? split.train : split.test).push_back(src[i]);
  };
  take(pos);
  take(neg);
  // Mix the classes so file order carries no label signal.
  shuffle(split.train, rng);
  shuffle(split.test, rng);
  return split;
}

BalancedBatcher::BalancedBatcher(const std::vector<uint8_t>& labels, int batch_size, uint64_t seed)
    : batch_size_(batch_size), rng_(seed) {
  if (batch_size < 2 || batch_size % 2 != 0)
    throw ValidationError("balanced batches need an even batch size of at least 2");
  for (uint32_t i = 0; i < labels.size(); ++i) (labels[i] ? pos_ : neg_).push_back(i);
  if (pos_.empty() || neg_.empty()) throw ValidationError("balanced batches need both classes in the training set");
}

std::vector<uint32_t> BalancedBatcher::next() {
  std::vector<uint32_t> batch;
  batch.reserve(size_t(batch_size_));
  const int half = batch_size_ / 2;
  for (int i = 0; i < half; ++i) batch.push_back(pos_[size_t(rng_.below(pos_.size()))]);
  for (int i = 0; i < half; ++i) batch.push_back(neg_[size_t(rng_.below(neg_.size()))]);
  return batch;
}

StandardStats standardize_fit(const double* values, size_t rows, size_t cols) {
  StandardStats stats;
  stats.mean.assign(cols, 0.0);
  stats.stdev.assign(cols, 0.0);
  if (rows == 0) return stats;
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) stats.mean[c] += values[r * cols + c];
  }
  for (size_t c = 0; c < cols; ++c) stats.mean[c] /= double(rows);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      const double d = values[r * cols + c] - stats.mean[c];
      stats.stdev[c] += d * d;
    }
  }
  for (size_t c = 0; c < cols; ++c) stats.stdev[c] = std::sqrt(stats.stdev[c] / double(rows));
  return stats;
}

void standardize_apply(double* values, size_t rows, size_t cols, const StandardStats& stats) {
  if (stats.mean.size() != cols || stats.stdev.size() != cols)
    throw ValidationError("standardization stats and matrix column counts differ");
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      double& x = values[r * cols + c];
      x = stats.stdev[c] == 0.0 ? 0.0 : (x - stats.mean[c]) / stats.stdev[c];
    }
  }
}

}  // namespace kgcast
