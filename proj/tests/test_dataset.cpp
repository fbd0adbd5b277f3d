#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "kgcast/dataset.hpp"
#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/graph.hpp"
#include "kgcast/snapshot.hpp"

using namespace kgcast;
using testfx::make_paper;

namespace {

std::vector<std::string> phrase_list(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(testfx::concept_phrase(i));
  return out;
}

// Graph over n concepts with the given co-mention links (all published on
// `date`, optional per-link yearly citations).
EvolvingGraph link_graph(int n, const std::vector<std::pair<int, int>>& links, const std::string& date = "2015-06-01",
                         std::map<int, int64_t> yearly = {}) {
  const auto phrases = phrase_list(n);
  std::vector<PaperRecord> corpus;
  int serial = 0;
  for (auto [a, b] : links) {
    corpus.push_back(make_paper("p" + std::to_string(serial++), phrases[size_t(a)] + ". " + phrases[size_t(b)], date,
                                yearly));
  }
  return EvolvingGraph::build(corpus, testfx::lexicon_of(phrases), {2012, 2023});
}

}  // namespace

TEST_CASE("sampling from a complete graph names the empty population") {
  std::vector<std::pair<int, int>> links;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) links.emplace_back(a, b);
  const auto graph = link_graph(4, links);
  const auto snap = GraphSnapshot::build(graph, year_end_day(2016));
  CHECK_THROWS_WITH_AS((void)sample_unconnected(snap, 1, 7), doctest::Contains("only 0 exist"), ValidationError);
}

TEST_CASE("an edgeless snapshot offers every unordered pair") {
  const auto graph = link_graph(6, {}, "2019-06-01");  // paper after cutoff
  const auto snap = GraphSnapshot::build(graph, year_end_day(2016));
  const auto pairs = sample_unconnected(snap, 15, 7);  // 6*5/2
  CHECK(pairs.size() == 15);
  std::set<std::pair<int32_t, int32_t>> seen(pairs.begin(), pairs.end());
  CHECK(seen.size() == 15);
  for (auto [u, v] : pairs) CHECK(u < v);
  CHECK_THROWS_AS((void)sample_unconnected(snap, 16, 7), ValidationError);
}

TEST_CASE("pair sampling is deterministic, duplicate-free, and respects the graph") {
  const auto graph = link_graph(10, {{0, 1}, {1, 2}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {0, 9}});
  const auto snap = GraphSnapshot::build(graph, year_end_day(2016));
  const auto a = sample_unconnected(snap, 20, 123);
  const auto b = sample_unconnected(snap, 20, 123);
  const auto c = sample_unconnected(snap, 20, 124);
  CHECK(a == b);
  CHECK(a != c);
  std::set<std::pair<int32_t, int32_t>> seen(a.begin(), a.end());
  CHECK(seen.size() == a.size());
  for (auto [u, v] : a) {
    CHECK(u < v);
    CHECK_FALSE(snap.connected(u, v));
  }
}

TEST_CASE("labels come from the citation window and the impact threshold") {
  // Pair (0,1) is linked by a 2020 paper earning 4+3 citations in 2021/22;
  // its 2019 window (2019, 2022] sums to 7.
  const auto phrases = phrase_list(4);
  std::vector<PaperRecord> corpus{
      make_paper("pA", phrases[0] + ". " + phrases[1], "2020-03-01", {{2021, 4}, {2022, 3}}),
      make_paper("pB", phrases[2] + ". " + phrases[3], "2020-03-01", {})};
  const auto graph = EvolvingGraph::build(corpus, testfx::lexicon_of(phrases), {2012, 2023});

  const std::vector<std::pair<int32_t, int32_t>> pairs{{0, 1}, {2, 3}, {0, 2}};
  auto labeled = label_pairs(graph, pairs, 2019, 3, 7);
  REQUIRE(labeled.size() == 3);
  CHECK(labeled[0].future_citations == 7);
  CHECK(labeled[0].label);  // boundary is inclusive
  CHECK(labeled[1].future_citations == 0);
  CHECK_FALSE(labeled[1].label);
  CHECK(labeled[2].future_citations == 0);
  CHECK_FALSE(labeled[2].label);

  // One threshold higher and the boundary pair flips negative.
  labeled = label_pairs(graph, pairs, 2019, 3, 8);
  CHECK_FALSE(labeled[0].label);
  // A shorter window misses the 2022 citations.
  labeled = label_pairs(graph, pairs, 2019, 2, 3);
  CHECK(labeled[0].future_citations == 4);
}

TEST_CASE("conditioned pairs keep only the class extremes") {
  // Three pairs connect during (2016, 2019]: citations 120, 50, 0.
  const auto phrases = phrase_list(6);
  std::vector<PaperRecord> corpus{
      make_paper("p0", phrases[0] + ". " + phrases[1], "2017-05-01", {{2018, 120}}),
      make_paper("p1", phrases[2] + ". " + phrases[3], "2017-05-01", {{2018, 50}}),
      make_paper("p2", phrases[4] + ". " + phrases[5], "2017-05-01", {})};
  const auto graph = EvolvingGraph::build(corpus, testfx::lexicon_of(phrases), {2012, 2023});

  const auto out = conditioned_pairs(graph, 2016, 3, 10, 100);
  REQUIRE(out.size() == 2);
  std::set<std::pair<int32_t, int32_t>> positives, negatives;
  for (const auto& lp : out) (lp.label ? positives : negatives).insert({lp.u, lp.v});
  CHECK(positives == std::set<std::pair<int32_t, int32_t>>{{0, 1}});
  CHECK(negatives == std::set<std::pair<int32_t, int32_t>>{{4, 5}});

  // Pairs already connected at y never qualify, so moving y past the papers
  // leaves nothing (and the empty-class guard reports it).
  CHECK_THROWS_AS((void)conditioned_pairs(graph, 2018, 3, 10, 100), ValidationError);
}

TEST_CASE("conditioned pairs report which class is missing") {
  const auto phrases = phrase_list(2);
  std::vector<PaperRecord> corpus{make_paper("p0", phrases[0] + ". " + phrases[1], "2017-05-01", {{2018, 120}})};
  const auto graph = EvolvingGraph::build(corpus, testfx::lexicon_of(phrases), {2012, 2023});
  CHECK_THROWS_WITH_AS((void)conditioned_pairs(graph, 2016, 3, 10, 100), doctest::Contains("negative"),
                       ValidationError);
  CHECK_THROWS_WITH_AS((void)conditioned_pairs(graph, 2016, 3, 10, 1000), doctest::Contains("positive"),
                       ValidationError);
}

TEST_CASE("balanced_build keeps all positives and splits 85/15 per class") {
  std::vector<LabeledPair> labeled;
  for (int i = 0; i < 1000; ++i) {
    LabeledPair lp;
    lp.u = i;
    lp.v = i + 1000;
    lp.label = i < 100;
    labeled.push_back(lp);
  }
  const auto split = balanced_build(labeled, 77);
  CHECK(split.train.size() + split.test.size() == 200);

  size_t train_pos = 0, test_pos = 0;
  std::set<uint32_t> all;
  for (uint32_t i : split.train) {
    train_pos += labeled[i].label ? 1 : 0;
    all.insert(i);
  }
  for (uint32_t i : split.test) {
    test_pos += labeled[i].label ? 1 : 0;
    all.insert(i);
  }
  CHECK(all.size() == 200);  // no row reused
  CHECK(train_pos + test_pos == 100);  // every positive kept
  CHECK(split.train.size() == 170);
  CHECK(split.test.size() == 30);
  CHECK(train_pos == 85);
  CHECK(test_pos == 15);
  // Negatives mirror the positives exactly.
  CHECK(split.train.size() - train_pos == 85);
  CHECK(split.test.size() - test_pos == 15);

  const auto again = balanced_build(labeled, 77);
  CHECK(again.train == split.train);
  CHECK(again.test == split.test);
  CHECK(balanced_build(labeled, 78).train != split.train);
}

TEST_CASE("balanced_build enforces the minimum positive count") {
  std::vector<LabeledPair> labeled(50);
  for (int i = 0; i < 9; ++i) labeled[size_t(i)].label = true;
  CHECK_THROWS_WITH_AS((void)balanced_build(labeled, 1), doctest::Contains("insufficient positives"),
                       ValidationError);
  CHECK_NOTHROW((void)balanced_build(labeled, 1, 9));
  std::vector<LabeledPair> none(50);
  CHECK_THROWS_WITH_AS((void)balanced_build(none, 1), doctest::Contains("insufficient positives"), ValidationError);
}

TEST_CASE("balanced batches are half positive, half negative") {
  std::vector<uint8_t> labels(900, 0);
  for (int i = 0; i < 40; ++i) labels[size_t(i)] = 1;
  BalancedBatcher batcher(labels, 1000, 5);
  const auto batch = batcher.next();
  REQUIRE(batch.size() == 1000);
  size_t pos = 0;
  for (uint32_t i : batch) pos += labels[i] ? 1 : 0;
  CHECK(pos == 500);  // with replacement, so more than the 40 distinct positives

  BalancedBatcher tiny(labels, 2, 5);
  const auto pair_batch = tiny.next();
  REQUIRE(pair_batch.size() == 2);
  CHECK(int(labels[pair_batch[0]]) + int(labels[pair_batch[1]]) == 1);

  CHECK_THROWS_AS(BalancedBatcher(labels, 3, 5), ValidationError);

  BalancedBatcher t1(labels, 100, 9), t2(labels, 100, 9);
  CHECK(t1.next() == t2.next());
  CHECK(t1.next() == t2.next());
}

TEST_CASE("standardization is fit on one set and applied to another") {
  // Two columns: constant 4, and {0,2} with mean 1, population std 1.
  std::vector<double> train{4.0, 0.0, 4.0, 2.0};
  const auto stats = standardize_fit(train.data(), 2, 2);
  CHECK(stats.mean == std::vector<double>{4.0, 1.0});
  CHECK(stats.stdev == std::vector<double>{0.0, 1.0});

  standardize_apply(train.data(), 2, 2, stats);
  CHECK(train == std::vector<double>{0.0, -1.0, 0.0, 1.0});

  // Test rows reuse the training statistics verbatim.
  std::vector<double> test{4.0, 5.0};
  standardize_apply(test.data(), 1, 2, stats);
  CHECK(test == std::vector<double>{0.0, 4.0});
}
