#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "toric/decoder.hpp"
#include "toric/lattice.hpp"
#include "toric/noise.hpp"

namespace toric {

struct TrialConfig {
    int L = 3;
    double p = 0.0;
    double tau = 0.02;
    std::uint64_t master_seed = 0;

    void validate() const;
};

// One sample-decode-compare round. Trial i draws from stream (master_seed, i),
// so the outcome is a pure function of (config, trial_index): reruns, resumes
// and any worker split reproduce it bit for bit.
bool run_trial(const TrialConfig& config, std::uint64_t trial_index);

struct FailureEstimate {
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double p_fail = 0.0;
    double sigma = 0.0;  // binomial: sqrt(p_fail * (1 - p_fail) / trials)
};

// Runs `trials` independent trials, indices 0..trials-1, split across
// `workers` threads in fixed-size blocks. Failure counts are integers summed
// over a partition of the index range, so the totals do not depend on the
// worker count or on scheduling.
FailureEstimate run_batch(const TrialConfig& config, std::uint64_t trials,
                          int workers = 1);

struct ExactFailureResult {
    int L = 0;
    double p = 0.0;
    double tau = 0.02;
    int max_weight = 0;  // highest enumerated error weight
    bool truncated = false;
    std::vector<std::uint64_t> total_chains;    // index = weight
    std::vector<std::uint64_t> failing_chains;  // index = weight
    double p_fail = 0.0;
    // Binomial upper bound on the probability mass of all weights above
    // max_weight; zero when the enumeration is complete.
    double truncation_bound = 0.0;
};

// Deterministic enumeration of every error chain up to a weight cutoff,
// counting the ones the decoder fails on. L = 3 enumerates all 2^18 chains;
// larger L (up to 7) defaults to weights <= ceil(L/2) + 2, which covers the
// leading failure orders. Counts are exact integers and worker-invariant;
// p only enters the final weighted sum.
ExactFailureResult exact_failure_probability(
    int L, double p, double tau = 0.02,
    std::optional<int> max_weight = std::nullopt, int workers = 1);

}  // namespace toric
