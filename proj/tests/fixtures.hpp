#pragma once

// Shared fixture builders for the unit tests: tiny hand-made corpora and
// lexicons with fully controlled values.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kgcast/corpus.hpp"
#include "kgcast/dates.hpp"
#include "kgcast/lexicon.hpp"

namespace kgcast::testfx {

inline PaperRecord make_paper(std::string id, std::string text, const std::string& iso_date,
                              std::map<int, int64_t> yearly = {}, int64_t total = -1) {
  PaperRecord p;
  p.paper_id = std::move(id);
  p.title = "t" + p.paper_id;
  p.abstract = std::move(text);
  p.pub_day = parse_iso_date(iso_date);
  p.yearly_citations = std::move(yearly);
  if (total < 0) {
    for (const auto& [year, count] : p.yearly_citations) p.total_citations += count;
    p.total_imputed = true;
  } else {
    p.total_citations = total;
  }
  return p;
}

// A lexicon with the given phrases as ids 0..n-1, bypassing corpus support
// counting. Word counts come from the phrases; supports are all 1.
inline ConceptLexicon lexicon_of(const std::vector<std::string>& phrases) {
  std::vector<LexiconEntry> entries;
  for (const std::string& phrase : phrases) {
    LexiconEntry e;
    e.phrase = phrase;
    e.word_count = 1;
    for (char c : phrase) e.word_count += c == ' ' ? 1 : 0;
    e.support = 1;
    entries.push_back(std::move(e));
  }
  return ConceptLexicon(std::move(entries));
}

// Concept phrases that survive the default filters: two plain words each.
inline std::string concept_phrase(int i) {
  static const char* kA[] = {"amber", "basalt", "cobalt", "dune",   "ember",  "fjord",  "garnet", "harbor",
                             "indigo", "jasper", "krypton", "lumen", "marble", "nickel", "onyx",   "pewter"};
  static const char* kB[] = {"array", "bridge", "circuit", "detector", "engine", "filter", "graph", "helix",
                             "ion",   "jet",    "kernel",  "lattice",  "matrix", "node",   "orbit", "prism"};
  return std::string(kA[i % 16]) + " " + kB[(i / 16 + i) % 16];
}

}  // namespace kgcast::testfx
