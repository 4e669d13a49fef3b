// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include "kpz/airy.hpp"
#include "kpz/landscape.hpp"
#include "kpz/lpp.hpp"
#include "kpz/parallel.hpp"

using namespace kpz;

namespace {

const lpp::IncrementTable& table() {
    static const lpp::IncrementTable inc = [] {
        lpp::BrownianSpec spec;
        spec.lines = 64;
        spec.step = 1.0 / 4096.0;
        spec.length = 2.0;
        return lpp::IncrementTable(lpp::brownian_ensemble(spec, 1));
    }();
    return inc;
}

std::vector<std::size_t> spread(std::size_t from, std::size_t to, std::size_t count) {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < count; ++i) v.push_back(from + (to - from) * i / (count - 1));
    return v;
}

const std::vector<std::size_t> kStarts = spread(0, 1024, 16);
const std::vector<std::size_t> kTargets = spread(4096, 8192, 16);

void BM_TableReference(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(lpp::bottom_to_top_table_reference(table(), kStarts, kTargets));
}

void BM_TableSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(lpp::bottom_to_top_table(table(), kStarts, kTargets, Execution::Serial));
}

void BM_TableParallel(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(lpp::bottom_to_top_table(table(), kStarts, kTargets, Execution::Parallel));
}

// Many starts, one target: the reversed sweep does one pass instead of one per start.
void BM_TableManyStartsReference(benchmark::State& st) {
    const std::vector<std::size_t> one{8192};
    for (auto _ : st) benchmark::DoNotOptimize(lpp::bottom_to_top_table_reference(table(), kStarts, one));
}

void BM_TableManyStartsParallel(benchmark::State& st) {
    const std::vector<std::size_t> one{8192};
    for (auto _ : st) benchmark::DoNotOptimize(lpp::bottom_to_top_table(table(), kStarts, one));
}

std::pair<airy::AirySheetSample, airy::AirySheetSample> sheets() {
    airy::AirySheetSample a, b;
    a.x_grid = a.y_grid = b.x_grid = b.y_grid = landscape::uniform_grid(4.0, 0.02);
    RngStream rng(2);
    const std::size_t m = a.x_grid.size();
    for (std::size_t k = 0; k < m * m; ++k) {
        a.values.push_back(rng.normal());
        b.values.push_back(rng.normal());
    }
    return {a, b};
}

void BM_ComposeReference(benchmark::State& st) {
    const auto [a, b] = sheets();
    for (auto _ : st) benchmark::DoNotOptimize(airy::sheet_compose_reference(a, b));
}

void BM_ComposeParallel(benchmark::State& st) {
    const auto [a, b] = sheets();
    for (auto _ : st) benchmark::DoNotOptimize(airy::sheet_compose(a, b, Execution::Parallel));
}

void replicas(benchmark::State& st, Execution mode) {
    const std::vector<double> ys{0.0};
    for (auto _ : st)
        benchmark::DoNotOptimize(map_replicas<airy::AiryLineSample>(
            64, [&](std::size_t r) { return airy::rescaled_melon(128, ys, r); }, mode));
}

void BM_ReplicasSerial(benchmark::State& st) { replicas(st, Execution::Serial); }
void BM_ReplicasParallel(benchmark::State& st) { replicas(st, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_TableReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TableParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TableManyStartsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TableManyStartsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ComposeReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComposeParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReplicasSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicasParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
