#include <benchmark/benchmark.h>

#include "combspec/oracle.hpp"
#include "combspec/wfomc.hpp"

using namespace combspec;

namespace {

const char* kSentences[] = {
    "(V x ~B(x,x))",
    "(V x E=1 y B(x,y)) & (V x E=1 y B(y,x))",
    "(V x E y B(x,y)) & (E x V y B(x,y) | B(y,x))",
    "(V x V y U(x) | ~U(y) | B(x,y)) & (V x E=1 y ~B(x,y))",
};

void BM_Wfomc(benchmark::State& state) {
    const Sentence s = parse_sentence(kSentences[state.range(0)]);
    const int n = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(wfomc(s, n));
}
BENCHMARK(BM_Wfomc)->ArgsProduct({{0, 1, 2, 3}, {5, 10, 20}})->Unit(benchmark::kMillisecond);

void BM_Compile(benchmark::State& state) {
    const Sentence s = parse_sentence(kSentences[state.range(0)]);
    for (auto _ : state) benchmark::DoNotOptimize(compile(s));
}
BENCHMARK(BM_Compile)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_Spectrum(benchmark::State& state) {
    const Sentence s = parse_sentence(kSentences[state.range(0)]);
    const int length = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(s, length));
}
BENCHMARK(BM_Spectrum)->ArgsProduct({{1, 2, 3}, {10, 20}})->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
    const Sentence s = parse_sentence(kSentences[state.range(0)]);
    const int n = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_count(s, n));
}
BENCHMARK(BM_Oracle)->ArgsProduct({{1, 3}, {2, 3}})->Unit(benchmark::kMillisecond);

}  // namespace
