#include "kgcast/suggest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <queue>

#include "kgcast/errors.hpp"
#include "kgcast/rake.hpp"

namespace kgcast {

namespace {

size_t find_slot(const char* name) {
  const auto& idx = feature_index();
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i].name == name) return i;
  }
  throw ValidationError(std::string("no feature slot named '") + name + "'");
}

// Heap entries ordered so the worst suggestion sits on top: lower score
// first, then LATER pair id, making the kept set (and every tie decision)
// independent of arrival order.
struct WorseFirst {
  bool operator()(const Suggestion& a, const Suggestion& b) const {
    if (a.score != b.score) return a.score > b.score;
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  }
};

std::vector<int32_t> checked_set(const std::optional<std::vector<int32_t>>& set, int32_t n_vertices) {
  std::vector<int32_t> out;
  if (!set) {
    out.resize(size_t(n_vertices));
    for (int32_t i = 0; i < n_vertices; ++i) out[size_t(i)] = i;
    return out;
  }
  out = *set;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && (out.front() < 0 || out.back() >= n_vertices))
    throw ValidationError("concept set holds an id outside 0.." + std::to_string(n_vertices - 1));
  return out;
}

}  // namespace

SuggestResult rank_pairs(const SnapshotTrio& trio, const ModelArtifact& model, const SuggestionQuery& query,
                         int workers) {
  if (query.top_k < 1) throw ValidationError("top_k must be at least 1");
  if (query.min_degree && query.max_degree && *query.min_degree > *query.max_degree)
    throw ValidationError("degree bounds are inconsistent: min exceeds max");
  if (model.layout_checksum != feature_layout_checksum())
    throw ValidationError("model feature layout does not match this build");

  const GraphSnapshot& now = trio.at(0);
  const int32_t n = now.num_vertices();
  const std::vector<int32_t> set_a = checked_set(query.set_a, n);
  const std::vector<int32_t> set_b = checked_set(query.set_b, n);
  std::vector<bool> in_a(size_t(n), false), in_b(size_t(n), false);
  for (int32_t c : set_a) in_a[size_t(c)] = true;
  for (int32_t c : set_b) in_b[size_t(c)] = true;

  static const size_t kCos = find_slot("cosine_y");
  static const size_t kDegU = find_slot("neighbors_u_y");
  static const size_t kDegV = find_slot("neighbors_v_y");

  SuggestResult result;
  std::priority_queue<Suggestion, std::vector<Suggestion>, WorseFirst> heap;

  constexpr size_t kBlock = 8192;
  std::vector<std::pair<int32_t, int32_t>> block;
  block.reserve(kBlock);

  auto flush = [&] {
    if (block.empty()) return;
    const std::vector<double> rows = compute_feature_rows(trio, block, workers);
    std::vector<std::pair<int32_t, int32_t>> kept;
    std::vector<double> kept_rows;
    for (size_t i = 0; i < block.size(); ++i) {
      const double* r = rows.data() + i * kNumFeatures;
      if (query.max_cosine && r[kCos] > *query.max_cosine) continue;
      if (query.min_degree && (r[kDegU] < *query.min_degree || r[kDegV] < *query.min_degree)) continue;
      if (query.max_degree && (r[kDegU] > *query.max_degree || r[kDegV] > *query.max_degree)) continue;
      kept.push_back(block[i]);
      kept_rows.insert(kept_rows.end(), r, r + kNumFeatures);
    }
    block.clear();
    if (kept.empty()) return;
    result.scored += kept.size();
    const std::vector<double> scores = predict_rows(model, kept_rows.data(), kept.size(), workers);
    for (size_t i = 0; i < kept.size(); ++i) {
      const double* r = kept_rows.data() + i * kNumFeatures;
      Suggestion s{kept[i].first, kept[i].second, scores[i], r[kCos], int64_t(r[kDegU]), int64_t(r[kDegV])};
      heap.push(s);
      if (int64_t(heap.size()) > query.top_k) heap.pop();
    }
  };

  // Each qualified unordered pair is claimed by exactly one (x, y) visit: the
  // forward orientation when x is the smaller id, otherwise only when the
  // forward orientation does not qualify on its own.
  for (int32_t x : set_a) {
    for (int32_t y : set_b) {
      if (x == y) continue;
      const int32_t u = std::min(x, y), v = std::max(x, y);
      if (x != u && in_a[size_t(u)] && in_b[size_t(v)]) continue;
      if (now.connected(u, v)) continue;
      ++result.candidates;
      block.emplace_back(u, v);
      if (block.size() == kBlock) flush();
    }
  }
  flush();

  result.top.resize(heap.size());
  for (size_t i = heap.size(); i-- > 0;) {
    result.top[i] = heap.top();
    heap.pop();
  }
  return result;
}

std::pair<std::vector<int32_t>, std::vector<std::string>> load_concept_set(const std::filesystem::path& path,
                                                                           const ConceptLexicon& lexicon) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open concept set file: " + path.string());
  std::vector<int32_t> ids;
  std::vector<std::string> unresolved;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    // Normalize the same way lexicon phrases were built.
    std::string normalized;
    for (const std::string& tok : token_stream(line)) {
      if (!normalized.empty()) normalized += ' ';
      normalized += tok;
    }
    if (normalized.empty()) continue;
    if (auto id = lexicon.id_of(normalized)) {
      ids.push_back(*id);
    } else {
      unresolved.push_back(line);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return {std::move(ids), std::move(unresolved)};
}

void write_suggestions_csv(const SuggestResult& result, const ConceptLexicon& lexicon, std::ostream& out) {
  out << "rank,concept_a,concept_b,score,cosine,deg_a,deg_b\n";
  char buf[40];
  for (size_t i = 0; i < result.top.size(); ++i) {
    const Suggestion& s = result.top[i];
    out << (i + 1) << ",\"" << lexicon.entry(s.u).phrase << "\",\"" << lexicon.entry(s.v).phrase << "\",";
    std::snprintf(buf, sizeof buf, "%.17g", s.score);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", s.cosine);
    out << buf << ',' << s.deg_u << ',' << s.deg_v << '\n';
  }
}

}  // namespace kgcast
