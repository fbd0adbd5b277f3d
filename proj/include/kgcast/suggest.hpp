#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgcast/features.hpp"
#include "kgcast/lexicon.hpp"
#include "kgcast/model.hpp"

namespace kgcast {

struct SuggestionQuery {
  std::optional<std::vector<int32_t>> set_a;  // absent = all concepts
  std::optional<std::vector<int32_t>> set_b;
  std::optional<double> max_cosine;           // keep pairs with cosine <= cap
  std::optional<double> min_degree;           // bounds apply to both endpoints
  std::optional<double> max_degree;
  int64_t top_k = 100;
};

struct Suggestion {
  int32_t u = 0;
  int32_t v = 0;
  double score = 0.0;
  double cosine = 0.0;
  int64_t deg_u = 0;
  int64_t deg_v = 0;
};

struct SuggestResult {
  std::vector<Suggestion> top;  // score descending, ties by (u,v)
  uint64_t candidates = 0;      // unconnected pairs enumerated
  uint64_t scored = 0;          // survivors of the filters
};

// Streams the unconnected pairs of A x B in canonical (u < v) order through
// fixed-size feature blocks: filter on the row's cosine/degree slots, score
// the survivors, keep the best top_k. Bounded memory in the candidate count.
SuggestResult rank_pairs(const SnapshotTrio& trio, const ModelArtifact& model, const SuggestionQuery& query,
                         int workers = 1);

// Newline-delimited phrases resolved against the lexicon; returns (ids,
// unresolvable lines). Matching is token-normalized, blank lines and '#'
// comments are skipped.
std::pair<std::vector<int32_t>, std::vector<std::string>> load_concept_set(const std::filesystem::path& path,
                                                                           const ConceptLexicon& lexicon);

// CSV "rank,concept_a,concept_b,score,cosine,deg_a,deg_b", rank from 1.
void write_suggestions_csv(const SuggestResult& result, const ConceptLexicon& lexicon, std::ostream& out);

}  // namespace kgcast
