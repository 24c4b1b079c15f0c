#include <benchmark/benchmark.h>

#include "emcert/optimize.hpp"
#include "emcert/witness.hpp"

using namespace emcert;

static void BM_SeesawGeneralRestart(benchmark::State& state) {
    const WitnessSpec spec = witness_w();
    SeesawConfig config;
    config.restarts = 1;
    config.threads = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        config.seed = seed++;
        auto r = seesaw(spec, config);
        benchmark::DoNotOptimize(r.best_value);
    }
}
BENCHMARK(BM_SeesawGeneralRestart);

static void BM_SeesawSeparableRestart(benchmark::State& state) {
    const WitnessSpec spec = witness_w();
    SeesawConfig config;
    config.restarts = 1;
    config.threads = 1;
    config.mode = SeesawMode::Separable;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        config.seed = seed++;
        auto r = seesaw(spec, config);
        benchmark::DoNotOptimize(r.best_value);
    }
}
BENCHMARK(BM_SeesawSeparableRestart);

static void BM_PovmUpdate(benchmark::State& state) {
    const WitnessSpec spec = witness_w();
    SeesawConfig config;
    std::mt19937_64 rng(3);
    const StartPoint sp = start_point(rng, SeesawMode::General, spec.dims());
    // effect objectives of the trigonal optimum, reconstructed from preparations
    std::vector<ComplexMatrix> f(3, ComplexMatrix(4));
    const auto alice = trigonal_preparations(Party::A);
    const auto bob = trigonal_preparations(Party::B);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            const ComplexMatrix joint = kron(alice.states[x].density, bob.states[y].density);
            for (int c = 0; c < 3; ++c) {
                const double w = spec.coeff(c, x, y, 0);
                if (w != 0.0) f[c] += w * joint;
            }
        }
    for (auto _ : state) {
        auto r = povm_update(f, sp.assembly.settings()[0]);
        benchmark::DoNotOptimize(r.objective);
    }
}
BENCHMARK(BM_PovmUpdate);
