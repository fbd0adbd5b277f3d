#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kgcast/corpus.hpp"
#include "kgcast/lexicon.hpp"

// Brute-force reference implementations used only by tests. They rebuild
// everything per call from raw papers with set-based bookkeeping and O(n^2)
// loops. Deliberately shares NO code with the production graph, snapshot,
// pagerank, ranking, feature, or metric modules; only ingest, lexicon
// matching, and calendar math are common ground.
namespace kgcast::oracle {

struct OracleParams {
  int year_first = 2012;  // calendar window citation vectors cover
  int year_last = 2023;
  double damping = 0.85;
  double tolerance = 1e-8;
  int max_iters = 100;
};

// All 141 slots for the pair (u, v) at prediction year y, in the documented
// layout order.
std::array<double, 141> oracle_features(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon,
                                        int32_t u, int32_t v, int y, const OracleParams& params);

// Probability a random positive outranks a random negative, ties one half,
// by literal pairwise counting.
double oracle_auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

// Citations earned in calendar years (y, y+delta] by every paper mentioning
// both concepts, regardless of publication date.
int64_t oracle_pair_citations(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon, int32_t u,
                              int32_t v, int y, int delta, const OracleParams& params);

}  // namespace kgcast::oracle
