#include "toric/montecarlo.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace toric {

namespace {

// Block size for handing trial indices to workers. Failure counts are summed
// over a partition of 0..N-1 either way; blocking only amortizes the atomic.
constexpr std::uint64_t kTrialBlock = std::uint64_t{1} << 14;

// Enumeration work is sharded by rank ranges within each weight class.
constexpr std::uint64_t kEnumChunk = std::uint64_t{1} << 16;

bool trial_fails(const Lattice& lattice, const NoiseModel& noise,
                 const DecoderConfig& decoder, std::uint64_t master_seed,
                 std::uint64_t trial_index) {
    const ErrorChain error =
        sample_error(lattice, noise, RandomStream{master_seed, trial_index});
    const Syndrome syndrome = lattice.syndrome(error);
    const ErrorChain correction = decode(syndrome, lattice, decoder);
    const ErrorChain residual = error ^ correction;
    // Kept on in release builds: a correction that fails to cancel the
    // syndrome invalidates every count downstream.
    if (!lattice.syndrome(residual).empty()) {
        throw std::logic_error("decode() left a nonempty syndrome");
    }
    return !lattice.homology_class(residual).trivial();
}

bool chain_fails(const Lattice& lattice, const DecoderConfig& decoder,
                 const ErrorChain& error) {
    const Syndrome syndrome = lattice.syndrome(error);
    if (syndrome.empty()) {
        // Already a cycle; the decoder would return an empty correction.
        return !lattice.homology_class(error).trivial();
    }
    const ErrorChain correction = decode(syndrome, lattice, decoder);
    const ErrorChain residual = error ^ correction;
    if (!lattice.syndrome(residual).empty()) {
        throw std::logic_error("decode() left a nonempty syndrome");
    }
    return !lattice.homology_class(residual).trivial();
}

double log_binomial(int n, int w) {
    return std::lgamma(n + 1.0) - std::lgamma(w + 1.0) - std::lgamma(n - w + 1.0);
}

}  // namespace

void TrialConfig::validate() const {
    const Lattice lattice(L);
    NoiseModel{p}.validate();
    DecoderConfig{tau}.validate(lattice);
}

bool run_trial(const TrialConfig& config, std::uint64_t trial_index) {
    config.validate();
    const Lattice lattice(config.L);
    return trial_fails(lattice, NoiseModel{config.p}, DecoderConfig{config.tau},
                       config.master_seed, trial_index);
}

FailureEstimate run_batch(const TrialConfig& config, std::uint64_t trials,
                          int workers) {
    config.validate();
    if (workers < 1) {
        throw std::invalid_argument("run_batch: workers must be >= 1");
    }
    FailureEstimate estimate;
    estimate.trials = trials;
    if (trials == 0) {
        return estimate;
    }

    const Lattice lattice(config.L);
    const NoiseModel noise{config.p};
    const DecoderConfig decoder{config.tau};

    const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::atomic<std::uint64_t> next_block{0};
    std::atomic<std::uint64_t> failures{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&] {
        try {
            for (;;) {
                const std::uint64_t block = next_block.fetch_add(1);
                if (block >= blocks) {
                    break;
                }
                const std::uint64_t lo = block * kTrialBlock;
                const std::uint64_t hi = std::min(trials, lo + kTrialBlock);
                std::uint64_t local = 0;
                for (std::uint64_t i = lo; i < hi; ++i) {
                    if (trial_fails(lattice, noise, decoder, config.master_seed, i)) {
                        ++local;
                    }
                }
                failures.fetch_add(local);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    estimate.failures = failures.load();
    estimate.p_fail =
        static_cast<double>(estimate.failures) / static_cast<double>(trials);
    estimate.sigma = std::sqrt(estimate.p_fail * (1.0 - estimate.p_fail) /
                               static_cast<double>(trials));
    return estimate;
}

ExactFailureResult exact_failure_probability(int L, double p, double tau,
                                             std::optional<int> max_weight,
                                             int workers) {
    const Lattice lattice(L);
    NoiseModel{p}.validate();
    const DecoderConfig decoder{tau};
    decoder.validate(lattice);
    if (L > 7) {
        throw std::invalid_argument(
            "exact_failure_probability: enumeration is only feasible for L <= 7");
    }
    if (workers < 1) {
        throw std::invalid_argument("exact_failure_probability: workers must be >= 1");
    }

    const int n = lattice.edge_count();
    int cutoff;
    if (max_weight.has_value()) {
        cutoff = *max_weight;
        if (cutoff < 0) {
            throw std::invalid_argument("exact_failure_probability: negative max_weight");
        }
        cutoff = std::min(cutoff, n);
    } else if (L == 3) {
        cutoff = n;
    } else {
        cutoff = (L + 1) / 2 + 2;
    }

    ExactFailureResult result;
    result.L = L;
    result.p = p;
    result.tau = tau;
    result.max_weight = cutoff;
    result.truncated = cutoff < n;
    result.total_chains.assign(static_cast<std::size_t>(cutoff) + 1, 0);
    result.failing_chains.assign(static_cast<std::size_t>(cutoff) + 1, 0);

    struct Shard {
        int weight;
        std::uint64_t begin;
        std::uint64_t end;
    };
    std::vector<Shard> shards;
    for (int w = 0; w <= cutoff; ++w) {
        const std::uint64_t total = ChainEnumerator::count(n, w);
        result.total_chains[static_cast<std::size_t>(w)] = total;
        for (std::uint64_t begin = 0; begin < total; begin += kEnumChunk) {
            shards.push_back({w, begin, std::min(total, begin + kEnumChunk)});
        }
    }

    std::atomic<std::size_t> next_shard{0};
    std::mutex merge_mutex;
    std::exception_ptr first_error;

    auto work = [&] {
        std::vector<std::uint64_t> local_failing(
            static_cast<std::size_t>(cutoff) + 1, 0);
        try {
            for (;;) {
                const std::size_t s = next_shard.fetch_add(1);
                if (s >= shards.size()) {
                    break;
                }
                const Shard& shard = shards[s];
                ChainEnumerator it(n, shard.weight, shard.begin);
                for (std::uint64_t rank = shard.begin; rank < shard.end; ++rank) {
                    if (chain_fails(lattice, decoder, it.chain(L))) {
                        ++local_failing[static_cast<std::size_t>(shard.weight)];
                    }
                    it.next();
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(merge_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (std::size_t w = 0; w < local_failing.size(); ++w) {
            result.failing_chains[w] += local_failing[w];
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    long double p_fail = 0.0L;
    if (p > 0.0) {
        const long double log_p = std::log(static_cast<long double>(p));
        const long double log_q = std::log1p(static_cast<long double>(-p));
        for (int w = 0; w <= cutoff; ++w) {
            const std::uint64_t failing =
                result.failing_chains[static_cast<std::size_t>(w)];
            if (failing == 0) {
                continue;
            }
            p_fail += static_cast<long double>(failing) *
                      std::exp(w * log_p + (n - w) * log_q);
        }
        if (result.truncated) {
            long double bound = 0.0L;
            for (int w = cutoff + 1; w <= n; ++w) {
                bound += std::exp(static_cast<long double>(log_binomial(n, w)) +
                                  w * log_p + (n - w) * log_q);
            }
            result.truncation_bound = static_cast<double>(bound);
        }
    }
    result.p_fail = static_cast<double>(p_fail);
    return result;
}

}  // namespace toric
