#include "kgcast/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "kgcast/binio.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/hash.hpp"

namespace kgcast {

namespace {
constexpr char kGraphMagic[9] = "KGGRAPH1";
}

EvolvingGraph EvolvingGraph::build(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon,
                                   YearRange years) {
  if (lexicon.size() == 0) throw ValidationError("cannot build a graph from an empty lexicon");

  EvolvingGraph g;
  g.num_vertices_ = lexicon.size();
  g.years_ = years;
  g.lexicon_checksum_ = lexicon.checksum();

  // Stable paper order: by day, then paper_id. Papers with < 2 matched
  // concepts form no edges and are dropped entirely.
  std::vector<const PaperRecord*> sorted;
  sorted.reserve(corpus.size());
  for (const PaperRecord& p : corpus) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const PaperRecord* a, const PaperRecord* b) {
    if (a->pub_day != b->pub_day) return a->pub_day < b->pub_day;
    return a->paper_id < b->paper_id;
  });

  for (const PaperRecord* p : sorted) {
    std::vector<int32_t> ids = lexicon.match(paper_text(*p));
    if (ids.size() < 2) continue;
    for (int32_t id : ids) {
      if (id < 0 || id >= g.num_vertices_)
        throw IntegrityError("concept id " + std::to_string(id) + " out of range for lexicon of size " +
                             std::to_string(g.num_vertices_));
    }
    GraphPaper gp;
    gp.paper_id = p->paper_id;
    gp.day = p->pub_day;
    gp.total = p->total_citations;
    gp.yearly.assign(size_t(years.size()), 0);
    for (auto& [year, n] : p->yearly_citations) {
      if (years.contains(year)) gp.yearly[size_t(years.index(year))] = n;
    }
    gp.concepts = ids;  // already sorted by match()

    const uint32_t paper_idx = uint32_t(g.papers_.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      for (size_t j = i + 1; j < ids.size(); ++j) {
        g.edges_.push_back({ids[i], ids[j], p->pub_day, paper_idx});
      }
    }
    g.papers_.push_back(std::move(gp));
  }
  // Paper order already gives (day, paper_id) sorting; within a paper, pairs
  // come out in (u,v) order because matched ids are sorted.
  g.rebuild_pair_index();
  return g;
}

void EvolvingGraph::rebuild_pair_index() {
  pair_index_.clear();
  pair_index_.reserve(edges_.size());
  for (uint32_t i = 0; i < edges_.size(); ++i) {
    pair_index_[pair_key(edges_[i].u, edges_[i].v)].push_back(i);
  }
}

const std::vector<uint32_t>* EvolvingGraph::pair_edges(int32_t u, int32_t v) const {
  if (u > v) std::swap(u, v);
  auto it = pair_index_.find(pair_key(u, v));
  return it == pair_index_.end() ? nullptr : &it->second;
}

bool EvolvingGraph::pair_connected_by(int32_t u, int32_t v, int64_t cutoff_day) const {
  const auto* idx = pair_edges(u, v);
  if (!idx) return false;
  for (uint32_t i : *idx) {
    if (edges_[i].day <= cutoff_day) return true;
  }
  return false;
}

CitationVector EvolvingGraph::merge_pair_citations(int32_t u, int32_t v, int64_t cutoff_day) const {
  CitationVector cv;
  cv.yearly.assign(size_t(years_.size()), 0);
  const auto* idx = pair_edges(u, v);
  if (!idx) return cv;
  for (uint32_t i : *idx) {
    const GraphEdge& e = edges_[i];
    if (e.day > cutoff_day) continue;
    const GraphPaper& p = papers_[e.paper];
    cv.total += p.total;
    for (size_t t = 0; t < cv.yearly.size(); ++t) cv.yearly[t] += p.yearly[t];
  }
  return cv;
}

int64_t EvolvingGraph::pair_citations_in_window(int32_t u, int32_t v, int y_start, int y_end) const {
  if (y_start >= y_end) throw ValidationError("citation window needs y_start < y_end");
  const auto* idx = pair_edges(u, v);
  if (!idx) return 0;
  int64_t sum = 0;
  for (uint32_t i : *idx) {
    const GraphPaper& p = papers_[edges_[i].paper];
    for (int year = y_start + 1; year <= y_end; ++year) {
      if (years_.contains(year)) sum += p.yearly[size_t(years_.index(year))];
    }
  }
  return sum;
}

namespace {

std::vector<TrajectoryEntry> top_of(std::vector<TrajectoryEntry>& all, const YearRange& years, int y1, int y2,
                                    int64_t k) {
  if (k < 1) throw ValidationError("top_growing needs k >= 1");
  std::vector<TrajectoryEntry> qualified;
  for (TrajectoryEntry& e : all) {
    int64_t before = 0, inside = 0;
    for (int year = years.first; year <= years.last; ++year) {
      int64_t n = e.yearly[size_t(years.index(year))];
      if (year <= y1) before += n;
      else if (year <= y2) inside += n;
    }
    if (before != 0) continue;  // previously cited
    e.growth = inside;
    qualified.push_back(std::move(e));
  }
  std::sort(qualified.begin(), qualified.end(), [](const TrajectoryEntry& a, const TrajectoryEntry& b) {
    if (a.growth != b.growth) return a.growth > b.growth;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  if (int64_t(qualified.size()) > k) qualified.resize(size_t(k));
  return qualified;
}

}  // namespace

std::vector<TrajectoryEntry> EvolvingGraph::top_growing_concepts(int y1, int y2, int64_t k) const {
  const size_t nv = size_t(num_vertices_);
  std::vector<std::vector<int64_t>> per_vertex(nv);
  std::vector<bool> seen(nv, false);
  for (const GraphPaper& p : papers_) {
    for (int32_t c : p.concepts) {
      if (!seen[size_t(c)]) {
        per_vertex[size_t(c)].assign(size_t(years_.size()), 0);
        seen[size_t(c)] = true;
      }
      for (size_t t = 0; t < p.yearly.size(); ++t) per_vertex[size_t(c)][t] += p.yearly[t];
    }
  }
  std::vector<TrajectoryEntry> all;
  for (int32_t c = 0; c < num_vertices_; ++c) {
    if (!seen[size_t(c)]) continue;  // never mentioned: nothing to rank
    all.push_back({c, -1, 0, std::move(per_vertex[size_t(c)])});
  }
  return top_of(all, years_, y1, y2, k);
}

std::vector<TrajectoryEntry> EvolvingGraph::top_growing_pairs(int y1, int y2, int64_t k) const {
  std::map<std::pair<int32_t, int32_t>, std::vector<int64_t>> per_pair;
  for (const GraphEdge& e : edges_) {
    auto [it, inserted] = per_pair.try_emplace({e.u, e.v});
    if (inserted) it->second.assign(size_t(years_.size()), 0);
    const GraphPaper& p = papers_[e.paper];
    for (size_t t = 0; t < p.yearly.size(); ++t) it->second[t] += p.yearly[t];
  }
  std::vector<TrajectoryEntry> all;
  for (auto& [pair, yearly] : per_pair) {
    all.push_back({pair.first, pair.second, 0, std::move(yearly)});
  }
  return top_of(all, years_, y1, y2, k);
}

void EvolvingGraph::save(const std::filesystem::path& path, const ArtifactMeta& meta) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open graph file for writing: " + path.string());
  write_artifact_header(out, kGraphMagic, 1, meta);

  write_le<int32_t>(out, num_vertices_);
  write_le<int32_t>(out, years_.first);
  write_le<int32_t>(out, years_.last);
  write_le<uint64_t>(out, lexicon_checksum_);

  write_le<uint64_t>(out, papers_.size());
  for (const GraphPaper& p : papers_) {
    write_string(out, p.paper_id);
    write_le<int64_t>(out, p.day);
    write_le<int64_t>(out, p.total);
    for (int64_t n : p.yearly) write_le<int64_t>(out, n);
    write_le<uint32_t>(out, uint32_t(p.concepts.size()));
    for (int32_t c : p.concepts) write_le<int32_t>(out, c);
  }
  // Edges are reproducible from papers; storing only the count keeps the
  // file small and the formats trivially consistent.
  write_le<uint64_t>(out, edges_.size());
  if (!out) throw ValidationError("I/O error while writing graph file: " + path.string());
}

EvolvingGraph EvolvingGraph::load(const std::filesystem::path& path, ArtifactMeta* meta_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open graph file: " + path.string());
  auto [version, meta] = read_artifact_header(in, kGraphMagic, 1);
  if (meta_out) *meta_out = meta;

  EvolvingGraph g;
  g.num_vertices_ = read_le<int32_t>(in);
  g.years_.first = read_le<int32_t>(in);
  g.years_.last = read_le<int32_t>(in);
  if (g.num_vertices_ < 0 || g.years_.first > g.years_.last)
    throw IntegrityError("graph file header is inconsistent: " + path.string());
  g.lexicon_checksum_ = read_le<uint64_t>(in);

  const uint64_t n_papers = read_le<uint64_t>(in);
  g.papers_.reserve(n_papers);
  for (uint64_t i = 0; i < n_papers; ++i) {
    GraphPaper p;
    p.paper_id = read_string(in);
    p.day = read_le<int64_t>(in);
    p.total = read_le<int64_t>(in);
    p.yearly.resize(size_t(g.years_.size()));
    for (int64_t& n : p.yearly) n = read_le<int64_t>(in);
    const uint32_t n_concepts = read_le<uint32_t>(in);
    if (n_concepts < 2) throw IntegrityError("graph paper with fewer than two concepts: " + path.string());
    p.concepts.resize(n_concepts);
    int32_t prev = -1;
    for (int32_t& c : p.concepts) {
      c = read_le<int32_t>(in);
      if (c <= prev || c >= g.num_vertices_) throw IntegrityError("graph concept ids corrupt: " + path.string());
      prev = c;
    }
    const uint32_t paper_idx = uint32_t(i);
    for (size_t a = 0; a < p.concepts.size(); ++a) {
      for (size_t b = a + 1; b < p.concepts.size(); ++b) {
        g.edges_.push_back({p.concepts[a], p.concepts[b], p.day, paper_idx});
      }
    }
    g.papers_.push_back(std::move(p));
  }
  const uint64_t n_edges = read_le<uint64_t>(in);
  if (n_edges != g.edges_.size())
    throw IntegrityError("graph edge count mismatch: header says " + std::to_string(n_edges) + ", rebuilt " +
                         std::to_string(g.edges_.size()));
  g.rebuild_pair_index();
  return g;
}

void EvolvingGraph::export_tsv(std::ostream& out) const {
  out << "# vertices=" << num_vertices_ << " years=" << years_.first << "-" << years_.last
      << " lexicon_checksum=" << checksum_hex(lexicon_checksum_) << '\n';
  out << "u\tv\tday\ttotal";
  for (int year = years_.first; year <= years_.last; ++year) out << "\ty" << year;
  out << '\n';
  for (const GraphEdge& e : edges_) {
    const GraphPaper& p = papers_[e.paper];
    out << e.u << '\t' << e.v << '\t' << e.day << '\t' << p.total;
    for (int64_t n : p.yearly) out << '\t' << n;
    out << '\n';
  }
}

}  // namespace kgcast
