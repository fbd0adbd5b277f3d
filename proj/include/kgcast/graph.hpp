#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgcast/artifact.hpp"
#include "kgcast/corpus.hpp"
#include "kgcast/lexicon.hpp"

namespace kgcast {

// Calendar years for which yearly citation counts are tracked. Years outside
// the range are ignored everywhere (the upstream data source truncates them).
struct YearRange {
  int first = 2012;
  int last = 2023;

  int size() const { return last - first + 1; }
  bool contains(int year) const { return year >= first && year <= last; }
  int index(int year) const { return year - first; }
  bool operator==(const YearRange&) const = default;
};

// Yearly counts aligned to a YearRange, plus the since-publication total.
struct CitationVector {
  int64_t total = 0;
  std::vector<int64_t> yearly;
};

// One co-mention: paper `paper` (index into papers()) connects concepts u < v.
struct GraphEdge {
  int32_t u = 0;
  int32_t v = 0;
  int64_t day = 0;
  uint32_t paper = 0;
};

// The subset of a PaperRecord the graph needs, with concepts resolved.
struct GraphPaper {
  std::string paper_id;
  int64_t day = 0;
  int64_t total = 0;
  std::vector<int64_t> yearly;    // aligned to the graph's YearRange
  std::vector<int32_t> concepts;  // sorted, size >= 2
};

struct TrajectoryEntry {
  int32_t u = 0;
  int32_t v = -1;  // -1 for single concepts
  int64_t growth = 0;
  std::vector<int64_t> yearly;  // aligned to the graph's YearRange
};

// The full temporal record: every edge ever formed, with multi-edges kept.
// Immutable after build/load; snapshots and labels are derived views.
class EvolvingGraph {
 public:
  static EvolvingGraph build(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon, YearRange years);

  int32_t num_vertices() const { return num_vertices_; }
  YearRange years() const { return years_; }
  uint64_t lexicon_checksum() const { return lexicon_checksum_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::vector<GraphPaper>& papers() const { return papers_; }

  // Edge indices for the unordered pair, or nullptr when never connected.
  const std::vector<uint32_t>* pair_edges(int32_t u, int32_t v) const;
  bool pair_connected_by(int32_t u, int32_t v, int64_t cutoff_day) const;

  // Element-wise sum of citation vectors over edge records with
  // day <= cutoff_day.
  CitationVector merge_pair_citations(int32_t u, int32_t v, int64_t cutoff_day) const;

  // Label source: citations of all (u,v) edge papers in calendar years
  // y_start+1 .. y_end, regardless of publication day.
  int64_t pair_citations_in_window(int32_t u, int32_t v, int y_start, int y_end) const;

  // Entities with zero citations up to year y1, ranked by citations gained in
  // (y1, y2]; ties by id. Trajectories cover the whole year range.
  std::vector<TrajectoryEntry> top_growing_concepts(int y1, int y2, int64_t k) const;
  std::vector<TrajectoryEntry> top_growing_pairs(int y1, int y2, int64_t k) const;

  void save(const std::filesystem::path& path, const ArtifactMeta& meta) const;
  static EvolvingGraph load(const std::filesystem::path& path, ArtifactMeta* meta_out = nullptr);

  // Human-inspectable dump; the binary file is the canonical artifact (the
  // TSV drops the per-paper grouping needed to rebuild vertex tallies).
  void export_tsv(std::ostream& out) const;

 private:
  int32_t num_vertices_ = 0;
  YearRange years_;
  uint64_t lexicon_checksum_ = 0;
  std::vector<GraphPaper> papers_;
  std::vector<GraphEdge> edges_;  // sorted by (day, paper_id, u, v)
  std::unordered_map<uint64_t, std::vector<uint32_t>> pair_index_;

  void rebuild_pair_index();
  friend class GraphSnapshot;
};

inline uint64_t pair_key(int32_t u, int32_t v) { return (uint64_t(uint32_t(u)) << 32) | uint32_t(v); }

}  // namespace kgcast
