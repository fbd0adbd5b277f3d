#include "kgcast/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "kgcast/errors.hpp"
#include "kgcast/hash.hpp"

namespace kgcast {

ConceptLexicon::ConceptLexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) { build_index(); }

void ConceptLexicon::build_index() {
  tokens_.resize(entries_.size());
  for (size_t id = 0; id < entries_.size(); ++id) {
    tokens_[id] = token_stream(entries_[id].phrase);
    if (tokens_[id].size() < 2)
      throw ValidationError("lexicon entry '" + entries_[id].phrase + "' has fewer than two words");
    by_phrase_.emplace(entries_[id].phrase, int32_t(id));
    by_first_token_[tokens_[id][0]].push_back(int32_t(id));
  }
}

std::optional<int32_t> ConceptLexicon::id_of(std::string_view phrase) const {
  auto it = by_phrase_.find(std::string(phrase));
  if (it == by_phrase_.end()) return std::nullopt;
  return it->second;
}

std::vector<int32_t> ConceptLexicon::match_tokens(const std::vector<std::string>& tokens) const {
  std::vector<int32_t> hits;
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto it = by_first_token_.find(tokens[i]);
    if (it == by_first_token_.end()) continue;
    for (int32_t id : it->second) {
      const auto& want = tokens_[size_t(id)];
      if (i + want.size() > tokens.size()) continue;
      bool ok = true;
      for (size_t k = 1; k < want.size(); ++k) {
        if (tokens[i + k] != want[k]) {
          ok = false;
          break;
        }
      }
      if (ok) hits.push_back(id);
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

std::vector<int32_t> ConceptLexicon::match(std::string_view text) const { return match_tokens(token_stream(text)); }

uint64_t ConceptLexicon::checksum() const {
  Fnv64 h;
  for (size_t id = 0; id < entries_.size(); ++id) {
    h.update_u64(id);
    h.update(entries_[id].phrase);
    h.update_u64(uint64_t(entries_[id].word_count));
    h.update_u64(uint64_t(entries_[id].support));
  }
  return h.value();
}

void ConceptLexicon::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open lexicon file for writing: " + path.string());
  out << "concept_id\tphrase\tword_count\tsupport\n";
  for (size_t id = 0; id < entries_.size(); ++id) {
    const LexiconEntry& e = entries_[id];
    out << id << '\t' << e.phrase << '\t' << e.word_count << '\t' << e.support << '\n';
  }
  if (!out) throw ValidationError("I/O error while writing lexicon file: " + path.string());
}

ConceptLexicon ConceptLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("lexicon file is empty: " + path.string());
  if (line != "concept_id\tphrase\tword_count\tsupport")
    throw IntegrityError("lexicon file has unexpected header: " + path.string());

  std::vector<LexiconEntry> entries;
  uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id_str, phrase, wc_str, support_str;
    if (!std::getline(ss, id_str, '\t') || !std::getline(ss, phrase, '\t') || !std::getline(ss, wc_str, '\t') ||
        !std::getline(ss, support_str)) {
      throw IntegrityError("lexicon line " + std::to_string(line_no) + " is malformed");
    }
    LexiconEntry e;
    e.phrase = phrase;
    e.word_count = std::stoi(wc_str);
    e.support = std::stoll(support_str);
    if (std::stoll(id_str) != int64_t(entries.size()))
      throw IntegrityError("lexicon ids are not dense at line " + std::to_string(line_no));
    entries.push_back(std::move(e));
  }
  return ConceptLexicon(std::move(entries));
}

std::vector<std::regex> load_filters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open filter file: " + path.string());
  std::vector<std::regex> filters;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      filters.emplace_back(line, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ValidationError("bad filter pattern at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return filters;
}

ConceptLexicon build_lexicon(const std::vector<PaperRecord>& corpus, const StopwordSet& stopwords, int64_t t2,
                             int64_t t3, const std::vector<std::regex>& filters) {
  if (corpus.empty()) throw ValidationError("cannot build a lexicon from an empty corpus");

  std::unordered_map<std::string, int64_t> support;
  for (const PaperRecord& p : corpus) {
    std::vector<std::string> candidates = rake_extract(paper_text(p), stopwords);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::string& phrase : candidates) {
      if (phrase.find(' ') == std::string::npos) continue;  // single words never become concepts
      support[std::move(phrase)] += 1;
    }
  }

  std::vector<LexiconEntry> kept;
  for (auto& [phrase, count] : support) {
    int32_t words = int32_t(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
    int64_t needed = (words == 2) ? t2 : t3;
    if (count < needed) continue;
    bool rejected = false;
    for (const std::regex& f : filters) {
      if (std::regex_search(phrase, f)) {
        rejected = true;
        break;
      }
    }
    if (rejected) continue;
    kept.push_back({phrase, words, count});
  }
  if (kept.empty()) throw ValidationError("empty lexicon: no phrase met the support thresholds");

  std::sort(kept.begin(), kept.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.phrase < b.phrase;
  });
  return ConceptLexicon(std::move(kept));
}

}  // namespace kgcast
