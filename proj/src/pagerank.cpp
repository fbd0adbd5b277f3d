#include "kgcast/pagerank.hpp"

#include <cmath>

#include "kgcast/errors.hpp"

namespace kgcast {

PagerankResult compute_pagerank(const std::vector<int64_t>& offsets, const std::vector<int32_t>& neighbors,
                                const PagerankParams& params) {
  if (params.damping <= 0.0 || params.damping >= 1.0)
    throw ValidationError("pagerank damping must lie strictly between 0 and 1");
  const size_t n = offsets.empty() ? 0 : offsets.size() - 1;
  PagerankResult result;
  if (n == 0) return result;

  const double d = params.damping;
  const double inv_n = 1.0 / double(n);
  std::vector<double> x(n, inv_n), next(n);

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    double dangling = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (offsets[i + 1] == offsets[i]) dangling += x[i];
    }
    for (size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        const int32_t j = neighbors[size_t(k)];
        s += x[size_t(j)] / double(offsets[size_t(j) + 1] - offsets[size_t(j)]);
      }
      next[i] = (1.0 - d) * inv_n + d * s + d * dangling * inv_n;
    }
    double delta = 0.0;
    for (size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
    x.swap(next);
    result.iterations = iter;
    if (delta < params.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.scores = std::move(x);
  return result;
}

}  // namespace kgcast
