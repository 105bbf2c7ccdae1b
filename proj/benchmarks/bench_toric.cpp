#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "toric/decoder.hpp"
#include "toric/lattice.hpp"
#include "toric/montecarlo.hpp"
#include "toric/noise.hpp"

namespace {

void BM_SampleError(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const toric::Lattice lattice(L);
    const toric::NoiseModel noise{0.1};
    std::uint64_t index = 0;
    for (auto _ : state) {
        const toric::ErrorChain chain =
            toric::sample_error(lattice, noise, {12345, index++});
        benchmark::DoNotOptimize(chain.weight());
    }
    state.SetItemsProcessed(state.iterations() * lattice.edge_count());
}
BENCHMARK(BM_SampleError)->Arg(5)->Arg(11)->Arg(21);

void BM_Syndrome(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const toric::Lattice lattice(L);
    const toric::ErrorChain chain =
        toric::sample_error(lattice, {0.1}, {999, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(lattice.syndrome(chain).count());
    }
}
BENCHMARK(BM_Syndrome)->Arg(5)->Arg(11)->Arg(21);

// Cycles through 64 pre-sampled error patterns so the measurement covers a
// realistic syndrome mix instead of one fixed instance.
void BM_Decode(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const double p = static_cast<double>(state.range(1)) / 1000.0;
    const toric::Lattice lattice(L);
    const toric::DecoderConfig config{0.02};
    std::vector<toric::Syndrome> syndromes;
    for (std::uint64_t i = 0; i < 64; ++i) {
        syndromes.push_back(
            lattice.syndrome(toric::sample_error(lattice, {p}, {777, i})));
    }
    std::size_t which = 0;
    for (auto _ : state) {
        const toric::Syndrome& syndrome = syndromes[which];
        which = (which + 1) % syndromes.size();
        benchmark::DoNotOptimize(toric::decode(syndrome, lattice, config).weight());
    }
}
BENCHMARK(BM_Decode)
    ->Args({5, 50})
    ->Args({9, 50})
    ->Args({13, 50})
    ->Args({9, 100})
    ->Args({13, 100});

void BM_Trial(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const toric::TrialConfig config{L, 0.08, 0.02, 4242};
    std::uint64_t trial = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(toric::run_trial(config, trial++));
    }
}
BENCHMARK(BM_Trial)->Arg(5)->Arg(9)->Arg(13);

void BM_Matching(benchmark::State& state) {
    const int defect_pairs = static_cast<int>(state.range(0));
    const int L = 25;
    const toric::Lattice lattice(L);
    const toric::DecoderConfig config{0.02};
    toric::Pcg32 rng(31337, 0);
    std::vector<toric::DefectGraph> graphs;
    for (int g = 0; g < 16; ++g) {
        std::vector<int> defects;
        while (static_cast<int>(defects.size()) < 2 * defect_pairs) {
            const int candidate =
                static_cast<int>(rng.next_below(static_cast<std::uint32_t>(L * L)));
            if (std::find(defects.begin(), defects.end(), candidate) ==
                defects.end()) {
                defects.push_back(candidate);
            }
        }
        std::sort(defects.begin(), defects.end());
        graphs.push_back(toric::build_defect_graph({L, defects}, lattice, config));
    }
    std::size_t which = 0;
    for (auto _ : state) {
        const toric::DefectGraph& graph = graphs[which];
        which = (which + 1) % graphs.size();
        benchmark::DoNotOptimize(
            toric::min_weight_perfect_matching(graph).total_weight);
    }
}
BENCHMARK(BM_Matching)->Arg(5)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
