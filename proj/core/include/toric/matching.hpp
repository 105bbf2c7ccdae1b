#pragma once

#include <utility>
#include <vector>

namespace toric {

// Exact minimum-weight perfect matching on a complete graph with n nodes
// (n even) given a dense symmetric weight matrix, weights[i*n + j].
//
// Solved with the primal-dual blossom method in max-cardinality mode, so
// optimality does not depend on integer weights or on triangle inequalities.
// Output is deterministic for identical input; exact double ties between
// pair exchanges are resolved toward the lexicographically smallest pairing.
// Returned pairs have first < second and are sorted.
std::vector<std::pair<int, int>> min_weight_perfect_matching(
    const std::vector<double>& weights, int n);

}  // namespace toric
