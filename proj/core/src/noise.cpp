#include "toric/noise.hpp"

#include <stdexcept>
#include <string>

namespace toric {

namespace {

constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) {
    inc_ = (stream << 1) | 1u;
    state_ = 0;
    (void)next_u32();
    state_ += seed;
    (void)next_u32();
}

std::uint32_t Pcg32::next_u32() {
    std::uint64_t old = state_;
    state_ = old * kPcgMultiplier + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
    auto rot = static_cast<std::uint32_t>(old >> 59);
    return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31));
}

std::uint64_t Pcg32::next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Pcg32::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t Pcg32::next_below(std::uint32_t bound) {
    // Lemire-style rejection; threshold keeps the result unbiased.
    std::uint32_t threshold = (-bound) % bound;
    for (;;) {
        std::uint32_t r = next_u32();
        std::uint64_t m = static_cast<std::uint64_t>(r) * bound;
        if (static_cast<std::uint32_t>(m) >= threshold) {
            return static_cast<std::uint32_t>(m >> 32);
        }
    }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index));
}

void NoiseModel::validate() const {
    if (!(p >= 0.0) || !(p <= 0.5)) {
        throw std::invalid_argument("flip probability must lie in [0, 0.5], got " +
                                    std::to_string(p));
    }
}

ErrorChain sample_error(const Lattice& lattice, const NoiseModel& noise,
                        const RandomStream& stream) {
    noise.validate();
    ErrorChain chain(lattice.size());
    Pcg32 rng = stream.engine();
    int n = lattice.edge_count();
    for (int e = 0; e < n; ++e) {
        if (rng.next_double() < noise.p) {
            chain.set(e);
        }
    }
    return chain;
}

std::uint64_t ChainEnumerator::count(int edge_count, int weight) {
    if (weight < 0 || edge_count < 0 || weight > edge_count) {
        return 0;
    }
    int k = weight;
    if (k > edge_count - k) {
        k = edge_count - k;
    }
    std::uint64_t result = 1;
    for (int i = 0; i < k; ++i) {
        // result * (n - i) stays exact in 128 bits; division is exact at
        // each step by the hockey-stick identity.
        unsigned __int128 numerator =
            static_cast<unsigned __int128>(result) *
            static_cast<unsigned __int128>(edge_count - i);
        numerator /= static_cast<unsigned __int128>(i + 1);
        if (numerator > static_cast<unsigned __int128>(UINT64_MAX)) {
            throw std::overflow_error("binomial coefficient exceeds 64 bits");
        }
        result = static_cast<std::uint64_t>(numerator);
    }
    return result;
}

ChainEnumerator::ChainEnumerator(int edge_count, int weight)
    : n_(edge_count), w_(weight) {
    if (weight < 0 || weight > edge_count) {
        done_ = true;
        return;
    }
    indices_.resize(static_cast<std::size_t>(weight));
    for (int i = 0; i < weight; ++i) {
        indices_[static_cast<std::size_t>(i)] = i;
    }
}

ChainEnumerator::ChainEnumerator(int edge_count, int weight,
                                 std::uint64_t start_rank)
    : n_(edge_count), w_(weight) {
    if (weight < 0 || weight > edge_count || start_rank >= count(edge_count, weight)) {
        done_ = true;
        return;
    }
    // Lexicographic unranking: pick each index as the smallest value whose
    // remaining-combination block still contains start_rank.
    indices_.resize(static_cast<std::size_t>(weight));
    std::uint64_t rank = start_rank;
    int value = 0;
    for (int slot = 0; slot < weight; ++slot) {
        for (;; ++value) {
            std::uint64_t block = count(n_ - value - 1, weight - slot - 1);
            if (rank < block) {
                break;
            }
            rank -= block;
        }
        indices_[static_cast<std::size_t>(slot)] = value;
        ++value;
    }
}

void ChainEnumerator::next() {
    if (done_) {
        return;
    }
    if (w_ == 0) {
        done_ = true;  // single empty combination
        return;
    }
    int i = w_ - 1;
    while (i >= 0 && indices_[static_cast<std::size_t>(i)] == n_ - w_ + i) {
        --i;
    }
    if (i < 0) {
        done_ = true;
        return;
    }
    ++indices_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < w_; ++j) {
        indices_[static_cast<std::size_t>(j)] = indices_[static_cast<std::size_t>(j - 1)] + 1;
    }
}

ErrorChain ChainEnumerator::chain(int L) const {
    ErrorChain c(L);
    for (int e : indices_) {
        c.set(e);
    }
    return c;
}

}  // namespace toric
