#include "fflm/backend.hpp"
#include "fflm/eval.hpp"
#include "fflm/extraction.hpp"
#include "fflm/metrics.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

namespace {

std::vector<double> random_probs(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto & p : out) {
        p = 1e-6 + (1.0 - 1e-6) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    }
    return out;
}

std::string sentence(size_t words, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::string out;
    for (size_t i = 0; i < words; i++) {
        out += (out.empty() ? "" : " ") + ("tok" + std::to_string(rng() % 500));
    }
    return out;
}

void bm_synthetic_score(benchmark::State & state) {
    fflm::synthetic_backend backend(42);
    const fflm::score_request req{"default", sentence(256, 1), sentence(48, 2)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(backend.score(req));
    }
    state.SetItemsProcessed(state.iterations() * 48);
}
BENCHMARK(bm_synthetic_score);

void bm_pair_bundle(benchmark::State & state) {
    fflm::synthetic_backend backend(42);
    const std::string document = sentence(static_cast<size_t>(state.range(0)), 3);
    const std::string summary = sentence(32, 4);
    const fflm::extraction_config config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fflm::build_pair_bundle(document, summary, config, backend, "default"));
    }
}
BENCHMARK(bm_pair_bundle)->Arg(128)->Arg(512);

void bm_score_pair(benchmark::State & state) {
    fflm::synthetic_backend backend(42);
    const auto bundle = fflm::build_pair_bundle(sentence(256, 3), sentence(32, 4), {}, backend,
                                                "default");
    for (auto _ : state) {
        benchmark::DoNotOptimize(fflm::score_pair(bundle, {}, {}));
    }
}
BENCHMARK(bm_score_pair);

void bm_delta_weighted(benchmark::State & state) {
    const size_t n = static_cast<size_t>(state.range(0));
    const auto a = fflm::prob_vector::from_probs(random_probs(n, 5));
    const auto b = fflm::prob_vector::from_probs(random_probs(n, 6));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fflm::delta_weighted(a, b));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(bm_delta_weighted)->Arg(64)->Arg(1024);

void bm_select_threshold(benchmark::State & state) {
    const size_t n = static_cast<size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::vector<double> scores = random_probs(n, 8);
    std::vector<int> labels(n);
    for (auto & l : labels) {
        l = static_cast<int>(rng() % 2);
    }
    labels[0] = 0;
    labels[1] = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fflm::select_threshold(scores, labels));
    }
}
BENCHMARK(bm_select_threshold)->Arg(1000)->Arg(10000);

void bm_grid_search(benchmark::State & state) {
    std::mt19937_64 rng(9);
    const size_t n = 200;
    std::vector<fflm::delta_triple> deltas(n);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; i++) {
        auto u = [&] { return -1.0 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
        deltas[i] = {u(), u(), u(), true};
        labels[i] = static_cast<int>(rng() % 2);
    }
    labels[0] = 0;
    labels[1] = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fflm::grid_search_weights(deltas, labels, 0.1));
    }
}
BENCHMARK(bm_grid_search);

void bm_correlate(benchmark::State & state) {
    const auto kind = static_cast<fflm::correlation_kind>(state.range(0));
    const auto x = random_probs(1000, 10);
    const auto y = random_probs(1000, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fflm::correlate(x, y, kind));
    }
}
BENCHMARK(bm_correlate)
    ->Arg(static_cast<int>(fflm::correlation_kind::pearson))
    ->Arg(static_cast<int>(fflm::correlation_kind::spearman))
    ->Arg(static_cast<int>(fflm::correlation_kind::kendall));

void bm_pairwise_sum(benchmark::State & state) {
    const auto values = random_probs(static_cast<size_t>(state.range(0)), 12);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fflm::pairwise_sum(values));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_pairwise_sum)->Arg(1 << 10)->Arg(1 << 16);

} // namespace

BENCHMARK_MAIN();
