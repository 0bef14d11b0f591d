// Serial reference kernels against their OpenMP versions.
// Args: rows, dimension, components.

#include <benchmark/benchmark.h>

#include <vector>

#include "bpred/core/rng.hpp"
#include "bpred/kernels/mixture.hpp"

using namespace bpred;

namespace {

struct Problem {
    kernels::ComponentSet set;
    std::vector<double> x, resp, out;
};

Problem make(const benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto k = static_cast<std::size_t>(state.range(2));
    Rng rng(1);
    Problem p;
    p.set.resize(k, d);
    for (auto& v : p.set.means) v = rng.normal(0, 3);
    for (std::size_t q = 0; q < k; ++q)
        for (std::size_t i = 0; i < d; ++i) p.set.chols[q * d * d + i * d + i] = rng.uniform(0.5, 2.0);
    p.x.resize(n * d);
    for (auto& v : p.x) v = rng.normal(0, 4);
    p.resp.resize(n * k);
    p.out.resize(std::max(n, k * d * d));
    kernels::EStepTotals t;
    kernels::estep_serial(p.set, p.x.data(), n, p.resp.data(), t);
    return p;
}

void rows_processed(benchmark::State& state) { state.SetItemsProcessed(state.iterations() * state.range(0)); }

template <bool Parallel>
void logpdf(benchmark::State& state) {
    auto p = make(state);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        if (Parallel)
            kernels::mixture_logpdf(p.set, p.x.data(), n, p.out.data());
        else
            kernels::mixture_logpdf_serial(p.set, p.x.data(), n, p.out.data());
        benchmark::DoNotOptimize(p.out.data());
    }
    rows_processed(state);
}

template <bool Parallel>
void estep(benchmark::State& state) {
    auto p = make(state);
    const auto n = static_cast<std::size_t>(state.range(0));
    kernels::EStepTotals t;
    for (auto _ : state) {
        if (Parallel)
            kernels::estep(p.set, p.x.data(), n, p.resp.data(), t);
        else
            kernels::estep_serial(p.set, p.x.data(), n, p.resp.data(), t);
        benchmark::DoNotOptimize(t.loglik);
    }
    rows_processed(state);
}

template <bool Parallel>
void scatter(benchmark::State& state) {
    auto p = make(state);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = p.set.dim, k = p.set.size();
    for (auto _ : state) {
        if (Parallel)
            kernels::weighted_scatter(p.x.data(), n, d, p.resp.data(), k, p.set.means.data(), p.out.data());
        else
            kernels::weighted_scatter_serial(p.x.data(), n, d, p.resp.data(), k, p.set.means.data(), p.out.data());
        benchmark::DoNotOptimize(p.out.data());
    }
    rows_processed(state);
}

// sizes typical of predictor fits: 8000 rows, 4 to 6 dims, up to 50 components
void sizes(benchmark::internal::Benchmark* b) {
    b->Args({8000, 4, 10})->Args({8000, 6, 50})->Args({100000, 4, 10})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(logpdf<false>)->Name("mixture_logpdf/serial")->Apply(sizes);
BENCHMARK(logpdf<true>)->Name("mixture_logpdf/omp")->Apply(sizes);
BENCHMARK(estep<false>)->Name("estep/serial")->Apply(sizes);
BENCHMARK(estep<true>)->Name("estep/omp")->Apply(sizes);
BENCHMARK(scatter<false>)->Name("weighted_scatter/serial")->Apply(sizes);
BENCHMARK(scatter<true>)->Name("weighted_scatter/omp")->Apply(sizes);

BENCHMARK_MAIN();
