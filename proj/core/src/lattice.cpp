#include "toric/lattice.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace toric {

namespace {

void check_edge_range(int edge, int count) {
    if (edge < 0 || edge >= count) {
        throw std::out_of_range("edge index " + std::to_string(edge) +
                                " outside [0, " + std::to_string(count) + ")");
    }
}

}  // namespace

ErrorChain::ErrorChain(int L) : L_(L) {
    if (L < 1) {
        throw std::invalid_argument("chain needs a positive lattice size");
    }
    words_.assign((static_cast<std::size_t>(edge_count()) + 63) / 64, 0);
}

int ErrorChain::weight() const {
    int w = 0;
    for (std::uint64_t word : words_) {
        w += std::popcount(word);
    }
    return w;
}

bool ErrorChain::test(int edge) const {
    check_edge_range(edge, edge_count());
    return (words_[static_cast<std::size_t>(edge) / 64] >> (edge % 64)) & 1u;
}

void ErrorChain::set(int edge, bool value) {
    check_edge_range(edge, edge_count());
    std::uint64_t mask = std::uint64_t{1} << (edge % 64);
    if (value) {
        words_[static_cast<std::size_t>(edge) / 64] |= mask;
    } else {
        words_[static_cast<std::size_t>(edge) / 64] &= ~mask;
    }
}

void ErrorChain::toggle(int edge) {
    check_edge_range(edge, edge_count());
    words_[static_cast<std::size_t>(edge) / 64] ^= std::uint64_t{1} << (edge % 64);
}

void ErrorChain::clear() {
    words_.assign(words_.size(), 0);
}

ErrorChain& ErrorChain::operator^=(const ErrorChain& other) {
    if (L_ != other.L_) {
        throw std::invalid_argument("chains belong to different lattice sizes");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] ^= other.words_[i];
    }
    return *this;
}

int ErrorChain::overlap_parity(const ErrorChain& other) const {
    if (L_ != other.L_) {
        throw std::invalid_argument("chains belong to different lattice sizes");
    }
    int parity = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        parity ^= std::popcount(words_[i] & other.words_[i]) & 1;
    }
    return parity;
}

std::vector<int> ErrorChain::edges() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(weight()));
    for_each_edge([&out](int e) { out.push_back(e); });
    return out;
}

Lattice::Lattice(int L) : L_(L) {
    if (L < 3 || L % 2 == 0) {
        throw std::invalid_argument("lattice size must be odd and >= 3, got " +
                                    std::to_string(L));
    }
    ref_vertical_ = ErrorChain(L);
    ref_horizontal_ = ErrorChain(L);
    for (int i = 0; i < L; ++i) {
        // Column of vertical edges at x = 0 and row of horizontal edges at
        // y = 0. These are primal loops: not cycles of this sector, but the
        // overlap parity against them classifies the sector's cycles.
        ref_vertical_.set(edge_index({1, 0, i}));
        ref_horizontal_.set(edge_index({0, i, 0}));
    }
}

int Lattice::edge_index(const EdgeCoord& c) const {
    if (c.orientation < 0 || c.orientation > 1 || c.x < 0 || c.x >= L_ ||
        c.y < 0 || c.y >= L_) {
        throw std::out_of_range("edge coordinate outside lattice");
    }
    return c.orientation * L_ * L_ + c.y * L_ + c.x;
}

EdgeCoord Lattice::edge_coord(int index) const {
    check_edge_range(index, edge_count());
    int orientation = index / (L_ * L_);
    int rem = index % (L_ * L_);
    return EdgeCoord{orientation, rem % L_, rem / L_};
}

std::pair<int, int> Lattice::plaquette_coord(int index) const {
    if (index < 0 || index >= plaquette_count()) {
        throw std::out_of_range("plaquette index outside lattice");
    }
    return {index % L_, index / L_};
}

std::array<int, 2> Lattice::edge_plaquettes(int edge) const {
    EdgeCoord c = edge_coord(edge);
    if (c.orientation == 0) {
        int below = (c.y + L_ - 1) % L_;
        return {plaquette_index(c.x, c.y), plaquette_index(c.x, below)};
    }
    int left = (c.x + L_ - 1) % L_;
    return {plaquette_index(c.x, c.y), plaquette_index(left, c.y)};
}

Syndrome Lattice::syndrome(const ErrorChain& chain) const {
    if (chain.lattice_size() != L_) {
        throw std::invalid_argument("chain belongs to a different lattice size");
    }
    std::vector<std::uint8_t> parity(static_cast<std::size_t>(plaquette_count()), 0);
    chain.for_each_edge([&](int e) {
        auto [a, b] = edge_plaquettes(e);
        parity[static_cast<std::size_t>(a)] ^= 1;
        parity[static_cast<std::size_t>(b)] ^= 1;
    });
    Syndrome s;
    s.L = L_;
    for (int p = 0; p < plaquette_count(); ++p) {
        if (parity[static_cast<std::size_t>(p)]) {
            s.defects.push_back(p);
        }
    }
    assert(s.defects.size() % 2 == 0);
    return s;
}

HomologyClass Lattice::homology_class(const ErrorChain& cycle) const {
    assert(is_cycle(cycle));
    return HomologyClass{cycle.overlap_parity(ref_vertical_),
                         cycle.overlap_parity(ref_horizontal_)};
}

std::pair<ErrorChain, ErrorChain> Lattice::logical_supports() const {
    ErrorChain horizontal_loop(L_);  // vertical edges along y = 0, wraps in x
    ErrorChain vertical_loop(L_);    // horizontal edges along x = 0, wraps in y
    for (int i = 0; i < L_; ++i) {
        horizontal_loop.set(edge_index({1, i, 0}));
        vertical_loop.set(edge_index({0, 0, i}));
    }
    return {horizontal_loop, vertical_loop};
}

}  // namespace toric
