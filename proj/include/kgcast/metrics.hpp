#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace kgcast {

// Rank-statistic AUC with ties counted one half: the probability that a
// random positive outranks a random negative. O(n log n). Throws
// ValidationError naming the missing class on single-class input.
double auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
  double auc_trapezoid = 0.0;
};

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

// Rows sorted by descending score, cut into n_bins nearly equal bins (the
// remainder goes to the leading bins); returns the mean citation count per
// bin, first bin = highest scores.
std::vector<double> bin_report(const std::vector<double>& scores, const std::vector<int64_t>& future_citations,
                               int n_bins = 20);

// Mean citations over the N highest-scored rows for each requested N (ties
// broken by stable input order).
std::vector<std::pair<uint64_t, double>> topn_mean(const std::vector<double>& scores,
                                                   const std::vector<int64_t>& future_citations,
                                                   const std::vector<uint64_t>& n_list);

// Spearman rank correlation (fractional ranks on both sides).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace kgcast
