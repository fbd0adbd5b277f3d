#pragma once

#include <cstdint>
#include <vector>

namespace kgcast {

struct PagerankParams {
  double damping = 0.85;
  double tolerance = 1e-8;
  int max_iters = 100;

  bool operator==(const PagerankParams&) const = default;
};

struct PagerankResult {
  std::vector<double> scores;  // sums to 1 within tolerance
  bool converged = false;
  int iterations = 0;
};

// Synchronous power iteration on an undirected simple graph given in CSR
// form. Mass of dangling (degree-0) vertices is redistributed uniformly, so
// scores always sum to 1. Non-convergence is flagged, not fatal.
//
// The update is written in one fixed expression evaluation order so that an
// independent implementation looping neighbors in the same (ascending) order
// produces bit-identical scores.
PagerankResult compute_pagerank(const std::vector<int64_t>& offsets, const std::vector<int32_t>& neighbors,
                                const PagerankParams& params);

}  // namespace kgcast
