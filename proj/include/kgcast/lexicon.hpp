#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgcast/corpus.hpp"
#include "kgcast/rake.hpp"

namespace kgcast {

struct LexiconEntry {
  std::string phrase;   // lowercase, single-space separated
  int32_t word_count = 0;
  int64_t support = 0;  // distinct papers producing the phrase as a candidate
};

// The vertex vocabulary. Ids are dense 0..N-1, assigned by descending support
// then lexicographic phrase order, so rebuilds are bit-stable.
class ConceptLexicon {
 public:
  ConceptLexicon() = default;
  explicit ConceptLexicon(std::vector<LexiconEntry> entries);

  int32_t size() const { return int32_t(entries_.size()); }
  const LexiconEntry& entry(int32_t id) const { return entries_.at(size_t(id)); }
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::optional<int32_t> id_of(std::string_view phrase) const;

  // Concept ids whose token sequence occurs in the text's token stream;
  // overlapping and nested matches all count. Sorted, deduplicated.
  std::vector<int32_t> match(std::string_view text) const;
  std::vector<int32_t> match_tokens(const std::vector<std::string>& tokens) const;

  // Over (id, phrase, word_count, support); identifies the vocabulary in
  // downstream artifact headers.
  uint64_t checksum() const;

  void save(const std::filesystem::path& path) const;  // TSV, sorted by id
  static ConceptLexicon load(const std::filesystem::path& path);

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<std::vector<std::string>> tokens_;             // per id
  std::unordered_map<std::string, int32_t> by_phrase_;
  std::unordered_map<std::string, std::vector<int32_t>> by_first_token_;
  void build_index();
};

// Rejection patterns (ECMAScript regex, one per line, '#' comments). A phrase
// matching any pattern is dropped before thresholding.
std::vector<std::regex> load_filters(const std::filesystem::path& path);

// Support = distinct papers whose title+abstract yields the phrase as a RAKE
// candidate. Single-word candidates are dropped, then filters, then the
// retention thresholds: word_count == 2 needs support >= t2, word_count >= 3
// needs support >= t3. Throws ValidationError when nothing survives.
ConceptLexicon build_lexicon(const std::vector<PaperRecord>& corpus, const StopwordSet& stopwords, int64_t t2,
                             int64_t t3, const std::vector<std::regex>& filters);

inline std::vector<int32_t> match_concepts(std::string_view text, const ConceptLexicon& lexicon) {
  return lexicon.match(text);
}

}  // namespace kgcast
