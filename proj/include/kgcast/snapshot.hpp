#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "kgcast/artifact.hpp"
#include "kgcast/graph.hpp"
#include "kgcast/pagerank.hpp"

namespace kgcast {

// Immutable aggregate of the graph at a cutoff day: simple-graph adjacency
// plus per-vertex paper and citation tallies. Safe to share across threads
// once pagerank() has been primed (the cache fills on first use).
class GraphSnapshot {
 public:
  static GraphSnapshot build(const EvolvingGraph& graph, int64_t cutoff_day);

  int64_t cutoff_day() const { return cutoff_day_; }
  int32_t num_vertices() const { return num_vertices_; }
  YearRange years() const { return years_; }
  uint64_t lexicon_checksum() const { return lexicon_checksum_; }

  std::span<const int32_t> neighbors(int32_t u) const {
    return {adj_.data() + offsets_[size_t(u)], size_t(offsets_[size_t(u) + 1] - offsets_[size_t(u)])};
  }
  int64_t degree(int32_t u) const { return offsets_[size_t(u) + 1] - offsets_[size_t(u)]; }
  bool connected(int32_t u, int32_t v) const;
  int64_t num_edges() const { return int64_t(adj_.size()) / 2; }  // unique pairs
  int64_t shared_neighbors(int32_t u, int32_t v) const;

  int64_t paper_count(int32_t u) const { return pn_[size_t(u)]; }                       // Pn
  int64_t yearly_citations(int32_t u, int year) const;                                  // C
  int64_t cumulative_citations(int32_t u, int year) const;                              // Ct
  int64_t trailing3_citations(int32_t u, int year) const;                               // Ct over year-2..year

  // Computed once per snapshot; later calls must pass the same params.
  const std::vector<double>& pagerank(const PagerankParams& params = {}) const;
  bool pagerank_converged() const;

  const std::vector<int64_t>& csr_offsets() const { return offsets_; }
  const std::vector<int32_t>& csr_neighbors() const { return adj_; }

  void save(const std::filesystem::path& path, const ArtifactMeta& meta) const;
  static GraphSnapshot load(const std::filesystem::path& path, ArtifactMeta* meta_out = nullptr);

 private:
  int64_t cutoff_day_ = 0;
  int32_t num_vertices_ = 0;
  YearRange years_;
  uint64_t lexicon_checksum_ = 0;
  std::vector<int64_t> offsets_;  // CSR, size V+1
  std::vector<int32_t> adj_;      // sorted per vertex
  std::vector<int64_t> pn_;
  std::vector<int64_t> yearly_;   // V x years, row-major
  mutable std::optional<std::pair<PagerankParams, PagerankResult>> pagerank_cache_;
};

}  // namespace kgcast
