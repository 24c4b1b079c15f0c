#include <benchmark/benchmark.h>

#include "emcert/bounds.hpp"
#include "emcert/model.hpp"
#include "emcert/simulate.hpp"
#include "emcert/witness.hpp"

using namespace emcert;

static void BM_BornTableIdeal(benchmark::State& state) {
    const auto alice = trigonal_preparations(Party::A);
    const auto bob = trigonal_preparations(Party::B);
    const auto bsm = partial_bsm_ideal();
    for (auto _ : state) {
        auto t = born_table(alice, bob, bsm);
        benchmark::DoNotOptimize(t.values().data());
    }
}
BENCHMARK(BM_BornTableIdeal);

static void BM_ClassicalBoundW(benchmark::State& state) {
    const WitnessSpec spec = witness_w();
    for (auto _ : state) {
        auto r = classical_bound(spec);
        benchmark::DoNotOptimize(r.max_value);
    }
}
BENCHMARK(BM_ClassicalBoundW);

static void BM_ClassicalBoundV(benchmark::State& state) {
    const WitnessSpec spec = witness_v();
    for (auto _ : state) {
        auto r = classical_bound(spec);
        benchmark::DoNotOptimize(r.max_value);
    }
}
BENCHMARK(BM_ClassicalBoundV);

static void BM_SampleCounts(benchmark::State& state) {
    const auto table = born_table(trigonal_preparations(Party::A),
                                  trigonal_preparations(Party::B), partial_bsm_ideal());
    const std::int64_t shots = state.range(0);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto c = sample_counts(table, shots, seed++);
        benchmark::DoNotOptimize(c.counts().data());
    }
}
BENCHMARK(BM_SampleCounts)->Arg(10'000)->Arg(1'000'000);
