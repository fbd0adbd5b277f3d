#include "kgcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgcast/errors.hpp"
#include "kgcast/ranking.hpp"

namespace kgcast {

namespace {

void check_two_classes(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  size_t pos = size_t(std::count(labels.begin(), labels.end(), uint8_t(1)));
  if (pos == 0) throw ValidationError("AUC needs at least one positive example");
  if (pos == labels.size()) throw ValidationError("AUC needs at least one negative example");
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
  check_two_classes(scores, labels);
  const std::vector<double> ranks = rank_transform(scores);
  double rank_sum_pos = 0.0;
  size_t n_pos = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      rank_sum_pos += ranks[i];
      ++n_pos;
    }
  }
  const size_t n_neg = labels.size() - n_pos;
  const double u = rank_sum_pos - double(n_pos) * double(n_pos + 1) / 2.0;
  return u / (double(n_pos) * double(n_neg));
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
  check_two_classes(scores, labels);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  const double n_pos = double(std::count(labels.begin(), labels.end(), uint8_t(1)));
  const double n_neg = double(labels.size()) - n_pos;

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  int64_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    // One threshold step per distinct score value.
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]]) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.emplace_back(double(fp) / n_neg, double(tp) / n_pos);
  }

  double area = 0.0;
  for (size_t k = 1; k < curve.points.size(); ++k) {
    const auto& [x0, y0] = curve.points[k - 1];
    const auto& [x1, y1] = curve.points[k];
    area += (x1 - x0) * (y0 + y1) / 2.0;
  }
  curve.auc_trapezoid = area;
  return curve;
}

std::vector<double> bin_report(const std::vector<double>& scores, const std::vector<int64_t>& future_citations,
                               int n_bins) {
  if (scores.empty()) throw ValidationError("bin report needs a non-empty input");
  if (scores.size() != future_citations.size()) throw ValidationError("scores and citations differ in length");
  if (n_bins < 2) throw ValidationError("bin report needs at least 2 bins");
  if (size_t(n_bins) > scores.size()) throw ValidationError("more bins than rows");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  const size_t base = scores.size() / size_t(n_bins);
  const size_t remainder = scores.size() % size_t(n_bins);
  std::vector<double> means;
  means.reserve(size_t(n_bins));
  size_t pos = 0;
  for (int b = 0; b < n_bins; ++b) {
    const size_t size = base + (size_t(b) < remainder ? 1 : 0);
    int64_t sum = 0;
    for (size_t k = 0; k < size; ++k) sum += future_citations[order[pos + k]];
    means.push_back(double(sum) / double(size));
    pos += size;
  }
  return means;
}

std::vector<std::pair<uint64_t, double>> topn_mean(const std::vector<double>& scores,
                                                   const std::vector<int64_t>& future_citations,
                                                   const std::vector<uint64_t>& n_list) {
  if (scores.size() != future_citations.size()) throw ValidationError("scores and citations differ in length");
  for (uint64_t n : n_list) {
    if (n == 0 || n > scores.size())
      throw ValidationError("top-N request " + std::to_string(n) + " is out of range for " +
                            std::to_string(scores.size()) + " rows");
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  // Prefix sums in score order make every N an O(1) lookup.
  std::vector<int64_t> prefix(scores.size() + 1, 0);
  for (size_t i = 0; i < order.size(); ++i) prefix[i + 1] = prefix[i] + future_citations[order[i]];

  std::vector<std::pair<uint64_t, double>> out;
  out.reserve(n_list.size());
  for (uint64_t n : n_list) out.emplace_back(n, double(prefix[size_t(n)]) / double(n));
  return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ValidationError("spearman needs two equal-length vectors, n >= 2");
  const std::vector<double> ra = rank_transform(a);
  const std::vector<double> rb = rank_transform(b);
  const double n = double(a.size());
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) throw ValidationError("spearman undefined for a constant vector");
  return cov / std::sqrt(va * vb);
}

}  // namespace kgcast
