#include "toric/decoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "toric/noise.hpp"

namespace toric {

namespace {

// Steps a plaquette coordinate along one axis, toggling the crossed edge.
// Moving from p(x,y) to p(x+1,y) crosses v(x+1,y); to p(x-1,y) crosses
// v(x,y). Moving to p(x,y+1) crosses h(x,y+1); to p(x,y-1) crosses h(x,y).
void walk_axis(const Lattice& lattice, int& x, int& y, int target, bool x_axis,
               ErrorChain& chain) {
    const int L = lattice.size();
    const int from = x_axis ? x : y;
    const int forward = (target - from + L) % L;
    int steps;
    int dir;
    if (2 * forward <= L) {
        steps = forward;
        dir = 1;
    } else {
        steps = L - forward;
        dir = -1;
    }
    for (int s = 0; s < steps; ++s) {
        if (x_axis) {
            if (dir > 0) {
                x = (x + 1) % L;
                chain.toggle(lattice.edge_index({1, x, y}));
            } else {
                chain.toggle(lattice.edge_index({1, x, y}));
                x = (x + L - 1) % L;
            }
        } else {
            if (dir > 0) {
                y = (y + 1) % L;
                chain.toggle(lattice.edge_index({0, x, y}));
            } else {
                chain.toggle(lattice.edge_index({0, x, y}));
                y = (y + L - 1) % L;
            }
        }
    }
}

}  // namespace

void DecoderConfig::validate(const Lattice& lattice) const {
    if (!(tau >= 0.0)) {
        throw std::invalid_argument("DecoderConfig: tau must be >= 0, got " +
                                    std::to_string(tau));
    }
    const double bound = tau * max_log_path_degeneracy(lattice.size());
    if (!(bound < 1.0)) {
        throw std::invalid_argument(
            "DecoderConfig: tau * ln(D_max) = " + std::to_string(bound) +
            " >= 1 at L = " + std::to_string(lattice.size()) +
            "; reduce tau so degeneracy stays a tie-break");
    }
}

Displacement torus_displacement(int plaq_a, int plaq_b, const Lattice& lattice) {
    const int L = lattice.size();
    if (plaq_a < 0 || plaq_a >= lattice.plaquette_count() || plaq_b < 0 ||
        plaq_b >= lattice.plaquette_count()) {
        throw std::out_of_range("torus_displacement: plaquette index out of range");
    }
    const auto [ax, ay] = lattice.plaquette_coord(plaq_a);
    const auto [bx, by] = lattice.plaquette_coord(plaq_b);
    const int rx = (bx - ax + L) % L;
    const int ry = (by - ay + L) % L;
    return {std::min(rx, L - rx), std::min(ry, L - ry)};
}

std::uint64_t path_degeneracy(int dx, int dy) {
    if (dx < 0 || dy < 0) {
        throw std::invalid_argument("path_degeneracy: negative displacement");
    }
    return ChainEnumerator::count(dx + dy, dx);
}

double log_path_degeneracy(int dx, int dy) {
    if (dx < 0 || dy < 0) {
        throw std::invalid_argument("log_path_degeneracy: negative displacement");
    }
    return std::lgamma(dx + dy + 1.0) - std::lgamma(dx + 1.0) -
           std::lgamma(dy + 1.0);
}

double max_log_path_degeneracy(int L) {
    const int half = L / 2;
    return log_path_degeneracy(half, half);
}

DefectGraph build_defect_graph(const Syndrome& syndrome, const Lattice& lattice,
                               const DecoderConfig& config) {
    if (syndrome.L != lattice.size()) {
        throw std::invalid_argument("build_defect_graph: syndrome/lattice size mismatch");
    }
    config.validate(lattice);

    DefectGraph graph;
    graph.defects = syndrome.defects;
    graph.n = static_cast<int>(graph.defects.size());
    if (graph.n % 2 != 0) {
        throw std::invalid_argument("build_defect_graph: odd defect count");
    }
    graph.weights.assign(static_cast<std::size_t>(graph.n) * graph.n, 0.0);
    for (int i = 0; i < graph.n; ++i) {
        for (int j = i + 1; j < graph.n; ++j) {
            const Displacement d =
                torus_displacement(graph.defects[i], graph.defects[j], lattice);
            const double w =
                d.dx + d.dy - config.tau * log_path_degeneracy(d.dx, d.dy);
            graph.weights[static_cast<std::size_t>(i) * graph.n + j] = w;
            graph.weights[static_cast<std::size_t>(j) * graph.n + i] = w;
        }
    }
    return graph;
}

Matching min_weight_perfect_matching(const DefectGraph& graph) {
    Matching result;
    result.pairs = min_weight_perfect_matching(graph.weights, graph.n);
    for (const auto& [i, j] : result.pairs) {
        result.total_weight += graph.weight(i, j);
    }
    return result;
}

ErrorChain correction_chain(const DefectGraph& graph, const Matching& matching,
                            const Lattice& lattice, PathOrder order) {
    ErrorChain chain(lattice.size());
    for (const auto& [i, j] : matching.pairs) {
        auto [x, y] = lattice.plaquette_coord(graph.defects[i]);
        const auto [tx, ty] = lattice.plaquette_coord(graph.defects[j]);
        if (order == PathOrder::XThenY) {
            walk_axis(lattice, x, y, tx, true, chain);
            walk_axis(lattice, x, y, ty, false, chain);
        } else {
            walk_axis(lattice, x, y, ty, false, chain);
            walk_axis(lattice, x, y, tx, true, chain);
        }
    }
    return chain;
}

ErrorChain decode(const Syndrome& syndrome, const Lattice& lattice,
                  const DecoderConfig& config) {
    const DefectGraph graph = build_defect_graph(syndrome, lattice, config);
    const Matching matching = min_weight_perfect_matching(graph);
    return correction_chain(graph, matching, lattice);
}

}  // namespace toric
