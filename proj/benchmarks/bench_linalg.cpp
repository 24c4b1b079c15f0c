#include <benchmark/benchmark.h>

#include <random>

#include "emcert/linalg.hpp"

using namespace emcert;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = gauss(rng);
        for (std::size_t j = i + 1; j < dim; ++j) {
            m(i, j) = Complex(gauss(rng), gauss(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

}  // namespace

static void BM_EigHermitian4(benchmark::State& state) {
    std::mt19937_64 rng(7);
    const ComplexMatrix m = random_hermitian(rng, 4);
    for (auto _ : state) {
        auto es = eig_hermitian(m);
        benchmark::DoNotOptimize(es.values.data());
    }
}
BENCHMARK(BM_EigHermitian4);

static void BM_Kron2x2(benchmark::State& state) {
    std::mt19937_64 rng(7);
    const ComplexMatrix a = random_hermitian(rng, 2);
    const ComplexMatrix b = random_hermitian(rng, 2);
    for (auto _ : state) {
        auto m = kron(a, b);
        benchmark::DoNotOptimize(m.entries().data());
    }
}
BENCHMARK(BM_Kron2x2);

static void BM_PsdSqrt4(benchmark::State& state) {
    std::mt19937_64 rng(7);
    const ComplexMatrix h = random_hermitian(rng, 4);
    const ComplexMatrix m = h * h.adjoint();
    for (auto _ : state) {
        auto r = psd_sqrt(m);
        benchmark::DoNotOptimize(r.entries().data());
    }
}
BENCHMARK(BM_PsdSqrt4);

static void BM_PartialTranspose(benchmark::State& state) {
    std::mt19937_64 rng(7);
    const ComplexMatrix m = random_hermitian(rng, 4);
    for (auto _ : state) {
        auto r = partial_transpose(m);
        benchmark::DoNotOptimize(r.entries().data());
    }
}
BENCHMARK(BM_PartialTranspose);

BENCHMARK_MAIN();
