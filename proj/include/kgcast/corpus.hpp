#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace kgcast {

// One publication. pub_day counts days since 1990-01-01 (may be negative).
// yearly_citations may omit years (the upstream data source truncates old
// years), so total_citations is stored independently and is NOT required to
// equal the sum of the yearly map.
struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::string abstract;
  int64_t pub_day = 0;
  std::map<int, int64_t> yearly_citations;
  int64_t total_citations = 0;
  // True when the input lacked a total and we filled in sum(yearly).
  bool total_imputed = false;

  bool operator==(const PaperRecord&) const = default;
};

struct Rejection {
  uint64_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<PaperRecord> records;
  std::vector<Rejection> rejections;
};

// Input: one JSON object per line with keys id, title, abstract,
// date (YYYY-MM-DD), cited_by_total, cited_by_year. Bad lines are collected,
// not fatal, unless strict is set (then any rejection throws ValidationError
// carrying the full report). Duplicate ids: the last record wins; the
// superseded one is counted as a rejection.
ParseResult parse_corpus(std::istream& in, bool strict = false);
ParseResult load_corpus(const std::filesystem::path& path, bool strict = false);

// Inverse of parse_corpus on valid records (exact round-trip). Records whose
// total was imputed are written without cited_by_total so a re-parse imputes
// it again.
void serialize_corpus(const std::vector<PaperRecord>& records, std::ostream& out);
void save_corpus(const std::vector<PaperRecord>& records, const std::filesystem::path& path);

// "line=<n> reason=<text>" per rejection.
std::string rejection_report_text(const std::vector<Rejection>& rejections);

// Canonical text fed to concept extraction and matching: title and abstract
// joined with a sentence break.
std::string paper_text(const PaperRecord& p);

}  // namespace kgcast
