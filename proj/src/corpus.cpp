#include "kgcast/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"

namespace kgcast {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Parses one line into `out`. Returns an empty string on success, otherwise
// the rejection reason.
std::string parse_record(const std::string& line, PaperRecord& out) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return "invalid JSON";
  if (!j.is_object()) return "record is not a JSON object";

  for (const char* key : {"id", "title", "abstract", "date"}) {
    if (!j.contains(key)) return std::string("missing field: ") + key;
  }
  if (!j["id"].is_string() || j["id"].get_ref<const std::string&>().empty())
    return "bad field: id (must be a non-empty string)";
  if (!j["title"].is_string()) return "bad field: title (must be a string)";
  if (!j["abstract"].is_string()) return "bad field: abstract (must be a string)";
  if (!j["date"].is_string()) return "bad field: date (must be a string)";

  out.paper_id = j["id"].get<std::string>();
  out.title = j["title"].get<std::string>();
  out.abstract = j["abstract"].get<std::string>();
  try {
    out.pub_day = parse_iso_date(j["date"].get_ref<const std::string&>());
  } catch (const ValidationError& e) {
    return std::string("bad field: date (") + e.what() + ")";
  }

  out.yearly_citations.clear();
  if (j.contains("cited_by_year")) {
    if (!j["cited_by_year"].is_object()) return "bad field: cited_by_year (must be an object)";
    for (auto& [key, val] : j["cited_by_year"].items()) {
      if (key.size() != 4 || key.find_first_not_of("0123456789") != std::string::npos)
        return "bad field: cited_by_year (year key '" + key + "' is not a 4-digit year)";
      if (!val.is_number_integer() || val.get<int64_t>() < 0)
        return "bad field: cited_by_year (count for " + key + " must be a non-negative integer)";
      out.yearly_citations[std::stoi(key)] = val.get<int64_t>();
    }
  }

  if (j.contains("cited_by_total")) {
    if (!j["cited_by_total"].is_number_integer() || j["cited_by_total"].get<int64_t>() < 0)
      return "bad field: cited_by_total (must be a non-negative integer)";
    out.total_citations = j["cited_by_total"].get<int64_t>();
    out.total_imputed = false;
  } else {
    int64_t sum = 0;
    for (auto& [year, n] : out.yearly_citations) sum += n;
    out.total_citations = sum;
    out.total_imputed = true;
  }
  return {};
}

}  // namespace

ParseResult parse_corpus(std::istream& in, bool strict) {
  ParseResult result;
  std::unordered_map<std::string, size_t> index_of_id;   // paper_id -> slot in records
  std::vector<uint64_t> line_of_slot;                    // for duplicate reporting
  std::string line;
  uint64_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    PaperRecord rec;
    std::string reason = parse_record(line, rec);
    if (!reason.empty()) {
      result.rejections.push_back({line_no, reason});
      continue;
    }
    auto [it, inserted] = index_of_id.try_emplace(rec.paper_id, result.records.size());
    if (inserted) {
      result.records.push_back(std::move(rec));
      line_of_slot.push_back(line_no);
    } else {
      // Last record wins; report the superseded earlier line.
      size_t slot = it->second;
      result.rejections.push_back(
          {line_of_slot[slot], "duplicate id: " + rec.paper_id + " superseded by line " + std::to_string(line_no)});
      result.records[slot] = std::move(rec);
      line_of_slot[slot] = line_no;
    }
  }
  if (in.bad()) throw ValidationError("I/O error while reading corpus stream");

  if (strict && !result.rejections.empty()) {
    throw ValidationError("strict parse failed with " + std::to_string(result.rejections.size()) + " rejection(s):\n" +
                          rejection_report_text(result.rejections));
  }
  return result;
}

ParseResult load_corpus(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path.string());
  return parse_corpus(in, strict);
}

void serialize_corpus(const std::vector<PaperRecord>& records, std::ostream& out) {
  for (const PaperRecord& p : records) {
    ordered_json j;
    j["id"] = p.paper_id;
    j["title"] = p.title;
    j["abstract"] = p.abstract;
    j["date"] = format_iso_date(p.pub_day);
    if (!p.total_imputed) j["cited_by_total"] = p.total_citations;
    ordered_json yearly = ordered_json::object();
    for (auto& [year, n] : p.yearly_citations) {
      char key[8];
      std::snprintf(key, sizeof key, "%04d", year);
      yearly[key] = n;
    }
    j["cited_by_year"] = yearly;
    out << j.dump() << '\n';
  }
}

void save_corpus(const std::vector<PaperRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open corpus file for writing: " + path.string());
  serialize_corpus(records, out);
  if (!out) throw ValidationError("I/O error while writing corpus file: " + path.string());
}

std::string rejection_report_text(const std::vector<Rejection>& rejections) {
  std::ostringstream os;
  for (const Rejection& r : rejections) os << "line=" << r.line << " reason=" << r.reason << '\n';
  return os.str();
}

std::string paper_text(const PaperRecord& p) { return p.title + ". " + p.abstract; }

}  // namespace kgcast
