#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "kgcast/errors.hpp"
#include "kgcast/metrics.hpp"
#include "kgcast/rng.hpp"
#include "oracle/oracle.hpp"

using namespace kgcast;

TEST_CASE("auc on the textbook examples") {
  CHECK(auc({0.1, 0.9}, {0, 1}) == 1.0);
  CHECK(auc({0.9, 0.1}, {0, 1}) == 0.0);
  CHECK(auc({0.5, 0.5}, {0, 1}) == 0.5);  // tie counts one half
  // One inversion among four: 3 of 4 positive/negative pairs ordered.
  CHECK(auc({0.8, 0.6, 0.7, 0.1}, {1, 1, 0, 0}) == 0.75);
}

TEST_CASE("auc rejects single-class input, naming the class") {
  CHECK_THROWS_WITH_AS((void)auc({0.1, 0.2}, {1, 1}), doctest::Contains("negative"), ValidationError);
  CHECK_THROWS_WITH_AS((void)auc({0.1, 0.2}, {0, 0}), doctest::Contains("positive"), ValidationError);
  CHECK_THROWS_AS((void)auc({}, {}), ValidationError);
}

TEST_CASE("auc complements under score negation and ignores monotone rescaling") {
  Rng rng(4);
  std::vector<double> scores;
  std::vector<uint8_t> labels;
  for (int i = 0; i < 300; ++i) {
    scores.push_back(double(rng.below(50)));  // heavy tie mass
    labels.push_back(uint8_t(rng.below(2)));
  }
  const double base = auc(scores, labels);
  std::vector<double> negated, rescaled;
  for (double s : scores) {
    negated.push_back(-s);
    rescaled.push_back(3.0 * s + 11.0);
  }
  CHECK(auc(negated, labels) == doctest::Approx(1.0 - base).epsilon(1e-15));
  CHECK(auc(rescaled, labels) == base);
}

TEST_CASE("auc matches pairwise counting on random score sets") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores;
    std::vector<uint8_t> labels;
    const int n = 30 + int(rng.below(100));
    const uint64_t levels = 2 + rng.below(40);  // small level counts force ties
    for (int i = 0; i < n; ++i) {
      scores.push_back(double(rng.below(levels)));
      labels.push_back(uint8_t(rng.below(2)));
    }
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!has_pos || !has_neg) continue;
    CHECK(std::fabs(auc(scores, labels) - oracle::oracle_auc(scores, labels)) <= 1e-15);
  }
}

TEST_CASE("a perfect ranker's roc curve passes through (0,1)") {
  const auto roc = roc_curve({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0});
  REQUIRE(roc.points.size() >= 3);
  CHECK(roc.points.front() == std::pair<double, double>{0.0, 0.0});
  CHECK(roc.points.back() == std::pair<double, double>{1.0, 1.0});
  const bool hits_corner = std::find(roc.points.begin(), roc.points.end(), std::pair<double, double>{0.0, 1.0}) !=
                           roc.points.end();
  CHECK(hits_corner);
  CHECK(roc.auc_trapezoid == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("trapezoid area equals the rank-statistic auc, ties included") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores;
    std::vector<uint8_t> labels;
    const int n = 50 + int(rng.below(200));
    const uint64_t levels = 2 + rng.below(30);
    bool has[2] = {false, false};
    for (int i = 0; i < n; ++i) {
      scores.push_back(double(rng.below(levels)) / 7.0);
      labels.push_back(uint8_t(rng.below(2)));
      has[labels.back()] = true;
    }
    if (!has[0] || !has[1]) continue;
    const auto roc = roc_curve(scores, labels);
    CHECK(std::fabs(roc.auc_trapezoid - auc(scores, labels)) <= 1e-12);
    // Tied scores collapse to one curve point: never more than distinct+1.
    std::map<double, int> distinct;
    for (double s : scores) distinct[s] = 1;
    CHECK(roc.points.size() <= distinct.size() + 1);
  }
}

TEST_CASE("bin means follow the score order") {
  // 40 rows whose citations rise with the score: bins strictly decrease.
  std::vector<double> scores;
  std::vector<int64_t> citations;
  for (int i = 0; i < 40; ++i) {
    scores.push_back(double(i));
    citations.push_back(int64_t(i) * 10);
  }
  const auto bins = bin_report(scores, citations, 20);
  REQUIRE(bins.size() == 20);
  // Bin 0 holds the two highest scores (39, 38): mean 385.
  CHECK(bins[0] == doctest::Approx(385.0));
  CHECK(bins[19] == doctest::Approx(5.0));
  for (size_t i = 1; i < bins.size(); ++i) CHECK(bins[i] < bins[i - 1]);

  // Constant citations flatten every bin.
  const auto flat = bin_report(scores, std::vector<int64_t>(40, 7), 20);
  for (double b : flat) CHECK(b == 7.0);
}

TEST_CASE("bin sizes differ by at most one and partition the rows") {
  Rng rng(6);
  std::vector<double> scores;
  std::vector<int64_t> citations;
  for (int i = 0; i < 53; ++i) {  // 53 = 20*2 + 13 remainder
    scores.push_back(rng.uniform01());
    citations.push_back(int64_t(rng.below(100)));
  }
  const auto bins = bin_report(scores, citations, 20);
  REQUIRE(bins.size() == 20);

  // Recover the multiset of all citations from the bin means: the first 13
  // bins hold 3 rows, the rest 2.
  double total = 0.0;
  for (size_t i = 0; i < bins.size(); ++i) total += bins[i] * (i < 13 ? 3.0 : 2.0);
  double expect = 0.0;
  for (int64_t c : citations) expect += double(c);
  CHECK(total == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS((void)bin_report({}, {}, 20), ValidationError);
  CHECK_THROWS_AS((void)bin_report(scores, citations, 0), ValidationError);
}

TEST_CASE("top-N means take the highest scores") {
  const std::vector<double> scores{0.1, 0.9, 0.5, 0.7};
  const std::vector<int64_t> cits{10, 80, 20, 40};
  const auto out = topn_mean(scores, cits, {1, 2, 4});
  REQUIRE(out.size() == 3);
  CHECK(out[0] == std::pair<uint64_t, double>{1, 80.0});
  CHECK(out[1] == std::pair<uint64_t, double>{2, 60.0});
  CHECK(out[2] == std::pair<uint64_t, double>{4, 37.5});  // global mean
  CHECK_THROWS_AS((void)topn_mean(scores, cits, {5}), ValidationError);
  CHECK_THROWS_AS((void)topn_mean(scores, cits, {0}), ValidationError);
}

TEST_CASE("spearman hits the bounds on monotone data") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> up{10.0, 20.0, 30.0, 40.0, 50.0};
  const std::vector<double> down{5.0, 4.0, 3.0, 2.0, 1.0};
  CHECK(spearman(a, up) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(a, down) == doctest::Approx(-1.0).epsilon(1e-15));
  // Any strictly monotone transform preserves the statistic.
  const std::vector<double> curved{1.0, 8.0, 27.0, 64.0, 125.0};
  CHECK(spearman(a, curved) == doctest::Approx(1.0).epsilon(1e-15));
}
