#include "kgcast/rake.hpp"

#include <fstream>
#include <unordered_map>

#include "kgcast/errors.hpp"

namespace kgcast {

namespace {

bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_delimiter_byte(unsigned char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}':
    case '"':
      return true;
    default:
      return false;
  }
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

// Walks the text once, appending tokens and marking run breaks via callback.
template <typename OnToken, typename OnBreak>
void scan(std::string_view text, OnToken&& on_token, OnBreak&& on_break) {
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      on_token(token);
      token.clear();
    }
  };
  for (size_t i = 0; i < text.size(); ++i) {
    unsigned char c = text[i];
    // U+2013 / U+2014 (en/em dash) are three-byte sequences e2 80 93/94.
    if (c == 0xe2 && i + 2 < text.size() && (unsigned char)text[i + 1] == 0x80 &&
        ((unsigned char)text[i + 2] == 0x93 || (unsigned char)text[i + 2] == 0x94)) {
      flush();
      on_break();
      i += 2;
      continue;
    }
    // U+00A0 no-break space: c2 a0.
    if (c == 0xc2 && i + 1 < text.size() && (unsigned char)text[i + 1] == 0xa0) {
      flush();
      i += 1;
      continue;
    }
    if (is_space_byte(c)) {
      flush();
    } else if (is_delimiter_byte(c)) {
      flush();
      on_break();
    } else {
      token += ascii_lower(char(c));
    }
  }
  flush();
}

}  // namespace

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stopword file: " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line) c = ascii_lower(c);
    words.insert(line);
  }
  if (words.empty()) throw ValidationError("stopword file is empty: " + path.string());
  return words;
}

std::vector<std::vector<std::string>> token_runs(std::string_view text) {
  std::vector<std::vector<std::string>> runs(1);
  scan(
      text, [&](const std::string& tok) { runs.back().push_back(tok); },
      [&] {
        if (!runs.back().empty()) runs.emplace_back();
      });
  if (runs.back().empty()) runs.pop_back();
  return runs;
}

std::vector<std::string> token_stream(std::string_view text) {
  std::vector<std::string> tokens;
  scan(
      text, [&](const std::string& tok) { tokens.push_back(tok); }, [] {});
  return tokens;
}

std::vector<std::string> rake_extract(std::string_view text, const StopwordSet& stopwords) {
  std::vector<std::string> candidates;
  std::string phrase;
  auto flush_phrase = [&] {
    if (!phrase.empty()) {
      candidates.push_back(phrase);
      phrase.clear();
    }
  };
  for (const auto& run : token_runs(text)) {
    for (const std::string& tok : run) {
      if (stopwords.count(tok)) {
        flush_phrase();
      } else {
        if (!phrase.empty()) phrase += ' ';
        phrase += tok;
      }
    }
    flush_phrase();
  }
  return candidates;
}

std::map<std::string, double> rake_score(const std::vector<std::string>& candidates) {
  struct WordStat {
    int64_t degree = 0;
    int64_t freq = 0;
  };
  std::unordered_map<std::string, WordStat> stats;
  std::vector<std::vector<std::string>> split;
  split.reserve(candidates.size());
  for (const std::string& phrase : candidates) {
    split.push_back(token_stream(phrase));
    const auto& words = split.back();
    std::unordered_set<std::string_view> seen;
    for (const std::string& w : words) {
      if (!seen.insert(w).second) continue;  // count each phrase once per word
      WordStat& s = stats[w];
      s.degree += int64_t(words.size());
      s.freq += 1;
    }
  }
  std::map<std::string, double> scores;
  for (size_t i = 0; i < candidates.size(); ++i) {
    double total = 0;
    std::unordered_set<std::string_view> seen;
    for (const std::string& w : split[i]) {
      if (!seen.insert(w).second) continue;
      const WordStat& s = stats[w];
      total += double(s.degree) / double(s.freq);
    }
    scores[candidates[i]] = total;
  }
  return scores;
}

}  // namespace kgcast
