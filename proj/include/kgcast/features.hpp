#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kgcast/graph.hpp"
#include "kgcast/pagerank.hpp"
#include "kgcast/snapshot.hpp"

namespace kgcast {

inline constexpr size_t kNumFeatures = 141;

struct FeatureSlot {
  std::string name;
  std::string formula;
};

// The canonical slot layout. Index blocks:
//   0-19   node network (neighbor counts, their 1y/2y growth + ranks, PageRank)
//   20-77  node citation (C, Ct, 3y window, Pn, per-paper means, growth + ranks)
//   78-98  pair network (shared neighbors and six overlap coefficients)
//   99-140 pair citation (ratios, sums, min/max aggregates)
// Triples run over reference years y, y-1, y-2; two-sided blocks interleave
// u then v within each year.
const std::vector<FeatureSlot>& feature_index();
uint64_t feature_layout_checksum();
std::string feature_index_tsv();

// The three snapshots a prediction year needs (cutoffs at Dec 31 of y, y-1,
// y-2) plus whole-population rank tables for the growth quantities. PageRank
// is primed here so the trio is safe to share across feature workers.
struct SnapshotTrio {
  int year = 0;
  PagerankParams pr_params;
  std::vector<GraphSnapshot> snaps;           // [0]=y, [1]=y-1, [2]=y-2
  std::vector<double> rank_new_neighbors[2];  // [0]: y vs y-1, [1]: y vs y-2
  std::vector<double> rank_new_citations[2];
  std::vector<double> rank_new_papers[2];

  static SnapshotTrio build(const EvolvingGraph& graph, int year, const PagerankParams& params = {});
  // Assemble from prebuilt snapshots (e.g. loaded caches); validates cutoffs.
  static SnapshotTrio assemble(std::vector<GraphSnapshot> snaps, int year, const PagerankParams& params = {});

  const GraphSnapshot& at(int years_back) const { return snaps[size_t(years_back)]; }

 private:
  void finish();
};

// Writes all 141 slots for the (u,v) pair. No connectivity check; the batch
// drivers validate their pair lists up front.
void fill_feature_row(const SnapshotTrio& trio, int32_t u, int32_t v, double* out);

// Checked single-pair variant: throws ValidationError when u == v or the pair
// is already connected at year y.
std::array<double, kNumFeatures> feature_vector(const SnapshotTrio& trio, int32_t u, int32_t v);

// Batch driver; output row i belongs to pairs[i] regardless of worker count.
// workers <= 0 picks the hardware concurrency.
std::vector<double> compute_feature_rows(const SnapshotTrio& trio, const std::vector<std::pair<int32_t, int32_t>>& pairs,
                                         int workers = 1);

}  // namespace kgcast
