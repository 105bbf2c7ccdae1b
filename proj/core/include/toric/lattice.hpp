#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

namespace toric {

// Edge addressing on an L x L torus with one qubit per edge (2*L^2 total).
//
// Vertices sit at integer coordinates (x, y) with 0 <= x, y < L and periodic
// wrap in both directions. orientation 0 is the horizontal edge from (x, y)
// to (x+1, y); orientation 1 the vertical edge from (x, y) to (x, y+1). The
// linear index is orientation*L^2 + y*L + x, which keeps a fixed-y run of
// vertical edges contiguous.
struct EdgeCoord {
    int orientation = 0;  // 0 horizontal, 1 vertical
    int x = 0;
    int y = 0;

    bool operator==(const EdgeCoord&) const = default;
};

// Edge subset with mod-2 arithmetic. Serves as error chain, correction
// chain, and logical-operator support alike.
class ErrorChain {
public:
    ErrorChain() = default;
    explicit ErrorChain(int L);

    int lattice_size() const { return L_; }
    int edge_count() const { return 2 * L_ * L_; }

    int weight() const;
    bool test(int edge) const;
    void set(int edge, bool value = true);
    void toggle(int edge);
    void clear();

    // Symmetric difference. Both operands must belong to the same lattice
    // size; throws std::invalid_argument otherwise.
    ErrorChain& operator^=(const ErrorChain& other);
    friend ErrorChain operator^(ErrorChain a, const ErrorChain& b) {
        a ^= b;
        return a;
    }
    bool operator==(const ErrorChain&) const = default;

    // Parity (0 or 1) of the overlap |this & other|.
    int overlap_parity(const ErrorChain& other) const;

    // Indices of set edges in increasing order.
    std::vector<int> edges() const;

    template <typename F>
    void for_each_edge(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                int b = std::countr_zero(bits);
                f(static_cast<int>(w * 64 + static_cast<std::size_t>(b)));
                bits &= bits - 1;
            }
        }
    }

private:
    int L_ = 0;
    std::vector<std::uint64_t> words_;
};

// Plaquette defect pattern. Plaquette (x, y) is the face whose lower-left
// corner is vertex (x, y); its index is y*L + x. Any chain flips an even
// number of plaquettes, so defects always come in pairs.
struct Syndrome {
    int L = 0;
    std::vector<int> defects;  // sorted plaquette indices

    bool empty() const { return defects.empty(); }
    int count() const { return static_cast<int>(defects.size()); }
};

// Winding parities of a cycle. h1 is the parity of the overlap with the
// vertical reference loop (the x = 0 column), h2 with the horizontal one
// (the y = 0 row). (0, 0) means the cycle is a stabilizer product.
struct HomologyClass {
    int h1 = 0;
    int h2 = 0;

    bool trivial() const { return h1 == 0 && h2 == 0; }
    bool operator==(const HomologyClass&) const = default;
};

// Toric-code geometry for odd L >= 3. Only the plaquette (X error) sector
// is represented; the vertex sector is its mirror image under duality, so
// simulating one of them suffices.
//
// Even L is rejected: with odd L the minimal torus wrap in each axis is
// unique, which keeps correction paths canonical.
class Lattice {
public:
    explicit Lattice(int L);

    int size() const { return L_; }
    int edge_count() const { return 2 * L_ * L_; }
    int plaquette_count() const { return L_ * L_; }

    int edge_index(const EdgeCoord& c) const;
    EdgeCoord edge_coord(int index) const;

    int plaquette_index(int x, int y) const { return y * L_ + x; }
    std::pair<int, int> plaquette_coord(int index) const;

    // The two plaquettes bordering an edge. A horizontal edge (x, y) borders
    // plaquettes (x, y) and (x, y-1); a vertical edge (x, y) borders
    // (x, y) and (x-1, y).
    std::array<int, 2> edge_plaquettes(int edge) const;

    // Plaquettes flipped an odd number of times by the chain.
    Syndrome syndrome(const ErrorChain& chain) const;

    bool is_cycle(const ErrorChain& chain) const { return syndrome(chain).empty(); }

    // Winding parities against the two stored primal reference loops. The
    // caller must pass a cycle; the parities are not defined otherwise.
    HomologyClass homology_class(const ErrorChain& cycle) const;

    // Minimal-weight representatives of the two nontrivial classes, as
    // chains this lattice can produce: the horizontal dual loop through
    // y = 0 (class (1,0)) and the vertical dual loop through x = 0 (class
    // (0,1)). Each has weight exactly L and empty syndrome.
    std::pair<ErrorChain, ErrorChain> logical_supports() const;

private:
    int L_ = 0;
    // Reference loops live on the primal lattice (a column of vertical
    // edges, a row of horizontal edges). Overlap parity against them is
    // invariant under adding stabilizer boundaries, which parity against
    // dual loops is not.
    ErrorChain ref_vertical_;
    ErrorChain ref_horizontal_;
};

}  // namespace toric
