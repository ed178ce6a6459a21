#pragma once

#include <vector>

#include "mvksc/types.hpp"

namespace mvksc {

/// Fraction of samples correctly clustered under the best one-to-one matching
/// of predicted to true clusters (maximum-weight bipartite assignment on the
/// confusion matrix, zero-padded to square when label cardinalities differ).
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Normalized mutual information with natural-log entropies and geometric-mean
/// normalization: I(pred; truth) / sqrt(H(pred) * H(truth)), clamped to [0, 1].
/// Degenerate marginals: 1 when the partitions match up to relabeling, else 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace mvksc
