#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace kgcast {

using StopwordSet = std::unordered_set<std::string>;

// Newline-delimited word list; blank lines and '#' comments ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Lowercased tokens grouped into runs. A new run starts at every phrase
// delimiter (.,;:!?()[]{}" and em/en dashes); hyphens stay inside tokens.
std::vector<std::vector<std::string>> token_runs(std::string_view text);

// The same tokens flattened, ignoring delimiters. Concept matching works on
// this stream, so a phrase may match across a comma; extraction (above) may
// not. Matching is therefore at least as permissive as extraction.
std::vector<std::string> token_stream(std::string_view text);

// RAKE candidates: maximal stopword-free token runs within delimiter runs,
// joined with single spaces. Single-word candidates and duplicates are kept;
// later stages filter and count them.
std::vector<std::string> rake_extract(std::string_view text, const StopwordSet& stopwords);

// Classic RAKE scores for one document's candidates. Per distinct word within
// a candidate: degree += candidate length, frequency += 1 (each duplicate
// candidate counts again). Word score = degree/frequency; a phrase scores the
// sum of its word scores.
std::map<std::string, double> rake_score(const std::vector<std::string>& candidates);

}  // namespace kgcast
