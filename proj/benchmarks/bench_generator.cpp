#include <benchmark/benchmark.h>

#include "combspec/generator.hpp"

using namespace combspec;

namespace {

void BM_CanonicalKey(benchmark::State& state) {
    const Sentence s = parse_sentence(state.range(0) == 0 ? "(V x E y B(x,y) | U(x))"
                                                          : "(V x V y U(x) | ~U(y) | B(x,y) | ~B(y,x)) & "
                                                            "(E x V y B(x,y) | U(y) | ~B(y,y))");
    for (auto _ : state) benchmark::DoNotOptimize(canonical_key(s));
}
BENCHMARK(BM_CanonicalKey)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Refinements(benchmark::State& state) {
    const Sentence s = parse_sentence("(V x E y B(x,y) | U(x))");
    for (auto _ : state) benchmark::DoNotOptimize(refinements(s, GenLimits::fo2()));
}
BENCHMARK(BM_Refinements)->Unit(benchmark::kMicrosecond);

void BM_GenerateLayers(benchmark::State& state) {
    GenOptions opts;
    opts.workers = 1;
    const int layers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        long kept = 0;
        generate_layers(GenLimits::fo2(), layers, [&](const GeneratedSentence&) { ++kept; }, opts);
        benchmark::DoNotOptimize(kept);
    }
}
BENCHMARK(BM_GenerateLayers)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace
