#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "toric/lattice.hpp"
#include "toric/matching.hpp"

namespace toric {

// Matching weights are w = d - tau * ln(D) where d is the torus Manhattan
// distance between two defects and D the number of minimal paths realizing
// it. tau small enough keeps the degeneracy term a tie-break between
// matchings of equal total distance; the validate() bound enforces that.
struct DecoderConfig {
    double tau = 0.02;

    // Requires tau >= 0 and tau * ln(D_max(L)) < 1, where D_max(L) is the
    // largest path count any defect pair on the lattice can have. The
    // default tau passes for every L up to 25.
    void validate(const Lattice& lattice) const;
};

struct Displacement {
    int dx = 0;
    int dy = 0;
};

// Per-axis minimal wrap distances between two plaquettes, each in [0, L/2].
Displacement torus_displacement(int plaq_a, int plaq_b, const Lattice& lattice);

// Number of monotone staircase paths across a dx-by-dy box: C(dx+dy, dx).
// Exact; throws std::overflow_error beyond 64 bits.
std::uint64_t path_degeneracy(int dx, int dy);

// ln C(dx+dy, dx) without overflow concerns; used for the actual weights.
double log_path_degeneracy(int dx, int dy);

// ln D_max(L) = ln C(2*floor(L/2), floor(L/2)).
double max_log_path_degeneracy(int L);

// Complete graph over the syndrome's defects with modified weights.
struct DefectGraph {
    int n = 0;
    std::vector<int> defects;      // plaquette indices, sorted
    std::vector<double> weights;   // dense n x n, symmetric, zero diagonal

    double weight(int i, int j) const {
        return weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(j)];
    }
};

DefectGraph build_defect_graph(const Syndrome& syndrome, const Lattice& lattice,
                               const DecoderConfig& config);

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // indices into DefectGraph::defects
    double total_weight = 0.0;
};

// Exact blossom matching on the defect graph. Exactness matters: the
// decoder's failure statistics degrade measurably under approximate
// matching, so there is no greedy fallback.
Matching min_weight_perfect_matching(const DefectGraph& graph);

// Correction paths walk the minimizing wrap direction axis by axis. The
// x-then-y order is the canonical one; y-then-x differs only by stabilizer
// boundaries and exists so tests can confirm that.
enum class PathOrder { XThenY, YThenX };

ErrorChain correction_chain(const DefectGraph& graph, const Matching& matching,
                            const Lattice& lattice,
                            PathOrder order = PathOrder::XThenY);

// syndrome -> defect graph -> matching -> correction. The result always
// reproduces the input syndrome.
ErrorChain decode(const Syndrome& syndrome, const Lattice& lattice,
                  const DecoderConfig& config);

}  // namespace toric
