#pragma once

#include <vector>

namespace kgcast {

// Ascending fractional ranks in 1..N; tied values share the mean of the
// positions they occupy, e.g. [5,5,1] -> [2.5, 2.5, 1].
std::vector<double> rank_transform(const std::vector<double>& values);

}  // namespace kgcast
