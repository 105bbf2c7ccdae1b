#pragma once

#include <cstdint>
#include <vector>

#include "toric/lattice.hpp"

namespace toric {

// pcg32 (XSH-RR 64/32). Small, fast, and reproducible across platforms:
// everything is 64-bit integer arithmetic, so a (seed, stream) pair pins the
// byte-exact sequence. Distinct stream ids select distinct increments and
// give independent sequences for the same seed, which is what per-trial
// seeding relies on.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 random bits.
    double next_double();

    // Uniform in [0, bound) without modulo bias.
    std::uint32_t next_below(std::uint32_t bound);

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// splitmix64 of (master_seed, index); used to give every sweep cell its own
// master seed as a pure function of grid position, never of execution order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// Independent X flips with probability p per edge. p is capped at 1/2; the
// decoder has nothing to say above that.
struct NoiseModel {
    double p = 0.0;

    void validate() const;
};

// A trial's random source. (master_seed, stream_index) fully determines the
// draw sequence, independent of scheduling and worker count.
struct RandomStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    Pcg32 engine() const { return Pcg32(master_seed, stream_index); }
};

// One Bernoulli(p) draw per edge, in edge-index order.
ErrorChain sample_error(const Lattice& lattice, const NoiseModel& noise,
                        const RandomStream& stream);

// Lexicographic enumeration of all weight-w edge subsets of an n-edge
// lattice, with combinatorial unranking so enumeration work can be sharded
// deterministically.
class ChainEnumerator {
public:
    ChainEnumerator(int edge_count, int weight);
    ChainEnumerator(int edge_count, int weight, std::uint64_t start_rank);

    // C(edge_count, weight); throws std::overflow_error if it does not fit
    // in 64 bits.
    static std::uint64_t count(int edge_count, int weight);

    bool done() const { return done_; }
    const std::vector<int>& indices() const { return indices_; }
    void next();

    ErrorChain chain(int L) const;

private:
    int n_ = 0;
    int w_ = 0;
    bool done_ = false;
    std::vector<int> indices_;
};

}  // namespace toric
