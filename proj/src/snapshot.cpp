#include "kgcast/snapshot.hpp"

#include <algorithm>
#include <fstream>

#include "kgcast/binio.hpp"
#include "kgcast/errors.hpp"

namespace kgcast {

namespace {
constexpr char kSnapMagic[9] = "KGSNAP01";
}

GraphSnapshot GraphSnapshot::build(const EvolvingGraph& graph, int64_t cutoff_day) {
  GraphSnapshot s;
  s.cutoff_day_ = cutoff_day;
  s.num_vertices_ = graph.num_vertices();
  s.years_ = graph.years();
  s.lexicon_checksum_ = graph.lexicon_checksum();

  const size_t v = size_t(s.num_vertices_);
  const size_t ny = size_t(s.years_.size());
  s.pn_.assign(v, 0);
  s.yearly_.assign(v * ny, 0);

  // Vertex tallies come from papers (each in-cutoff paper counts once per
  // concept it mentions), adjacency from the collapsed multi-edges.
  std::vector<std::pair<int32_t, int32_t>> pairs;
  for (const GraphPaper& p : graph.papers()) {
    if (p.day > cutoff_day) continue;
    for (int32_t c : p.concepts) {
      s.pn_[size_t(c)] += 1;
      int64_t* row = s.yearly_.data() + size_t(c) * ny;
      for (size_t t = 0; t < ny; ++t) row[t] += p.yearly[t];
    }
    for (size_t i = 0; i < p.concepts.size(); ++i) {
      for (size_t j = i + 1; j < p.concepts.size(); ++j) {
        pairs.emplace_back(p.concepts[i], p.concepts[j]);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<int64_t> deg(v, 0);
  for (auto& [a, b] : pairs) {
    deg[size_t(a)] += 1;
    deg[size_t(b)] += 1;
  }
  s.offsets_.assign(v + 1, 0);
  for (size_t i = 0; i < v; ++i) s.offsets_[i + 1] = s.offsets_[i] + deg[i];
  s.adj_.resize(size_t(s.offsets_[v]));
  std::vector<int64_t> cursor(s.offsets_.begin(), s.offsets_.end() - 1);
  for (auto& [a, b] : pairs) {
    s.adj_[size_t(cursor[size_t(a)]++)] = b;
    s.adj_[size_t(cursor[size_t(b)]++)] = a;
  }
  // Filling from lexicographically sorted pairs leaves every neighbor list
  // sorted: a vertex first receives its smaller neighbors (from the 'b' side,
  // ascending) and then its larger ones (from the 'a' side, ascending).
  return s;
}

bool GraphSnapshot::connected(int32_t u, int32_t v) const {
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

int64_t GraphSnapshot::shared_neighbors(int32_t u, int32_t v) const {
  auto a = neighbors(u);
  auto b = neighbors(v);
  int64_t count = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (a[i] > b[j]) ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

int64_t GraphSnapshot::yearly_citations(int32_t u, int year) const {
  if (!years_.contains(year)) return 0;
  return yearly_[size_t(u) * size_t(years_.size()) + size_t(years_.index(year))];
}

int64_t GraphSnapshot::cumulative_citations(int32_t u, int year) const {
  const int last = std::min(year, years_.last);
  int64_t sum = 0;
  for (int t = years_.first; t <= last; ++t) {
    sum += yearly_[size_t(u) * size_t(years_.size()) + size_t(years_.index(t))];
  }
  return sum;
}

int64_t GraphSnapshot::trailing3_citations(int32_t u, int year) const {
  int64_t sum = 0;
  for (int t = year - 2; t <= year; ++t) {
    if (years_.contains(t)) sum += yearly_[size_t(u) * size_t(years_.size()) + size_t(years_.index(t))];
  }
  return sum;
}

const std::vector<double>& GraphSnapshot::pagerank(const PagerankParams& params) const {
  if (pagerank_cache_) {
    if (!(pagerank_cache_->first == params))
      throw ValidationError("snapshot pagerank was already computed with different parameters");
    return pagerank_cache_->second.scores;
  }
  pagerank_cache_.emplace(params, compute_pagerank(offsets_, adj_, params));
  return pagerank_cache_->second.scores;
}

bool GraphSnapshot::pagerank_converged() const {
  return pagerank_cache_ ? pagerank_cache_->second.converged : false;
}

void GraphSnapshot::save(const std::filesystem::path& path, const ArtifactMeta& meta) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open snapshot file for writing: " + path.string());
  write_artifact_header(out, kSnapMagic, 1, meta);
  write_le<int64_t>(out, cutoff_day_);
  write_le<int32_t>(out, num_vertices_);
  write_le<int32_t>(out, years_.first);
  write_le<int32_t>(out, years_.last);
  write_le<uint64_t>(out, lexicon_checksum_);
  write_le<uint64_t>(out, offsets_.size());
  for (int64_t o : offsets_) write_le<int64_t>(out, o);
  write_le<uint64_t>(out, adj_.size());
  for (int32_t a : adj_) write_le<int32_t>(out, a);
  for (int64_t p : pn_) write_le<int64_t>(out, p);
  for (int64_t c : yearly_) write_le<int64_t>(out, c);
  if (!out) throw ValidationError("I/O error while writing snapshot file: " + path.string());
}

GraphSnapshot GraphSnapshot::load(const std::filesystem::path& path, ArtifactMeta* meta_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open snapshot file: " + path.string());
  auto [version, meta] = read_artifact_header(in, kSnapMagic, 1);
  if (meta_out) *meta_out = meta;

  GraphSnapshot s;
  s.cutoff_day_ = read_le<int64_t>(in);
  s.num_vertices_ = read_le<int32_t>(in);
  s.years_.first = read_le<int32_t>(in);
  s.years_.last = read_le<int32_t>(in);
  s.lexicon_checksum_ = read_le<uint64_t>(in);
  const uint64_t n_off = read_le<uint64_t>(in);
  if (n_off != uint64_t(s.num_vertices_) + 1) throw IntegrityError("snapshot offsets corrupt: " + path.string());
  s.offsets_.resize(n_off);
  for (int64_t& o : s.offsets_) o = read_le<int64_t>(in);
  const uint64_t n_adj = read_le<uint64_t>(in);
  if (int64_t(n_adj) != s.offsets_.back()) throw IntegrityError("snapshot adjacency corrupt: " + path.string());
  s.adj_.resize(n_adj);
  for (int32_t& a : s.adj_) a = read_le<int32_t>(in);
  s.pn_.resize(size_t(s.num_vertices_));
  for (int64_t& p : s.pn_) p = read_le<int64_t>(in);
  s.yearly_.resize(size_t(s.num_vertices_) * size_t(s.years_.size()));
  for (int64_t& c : s.yearly_) c = read_le<int64_t>(in);
  return s;
}

}  // namespace kgcast
