// Serial reference path against the OpenMP kernels on a synthetic collection.
// Arg 0 runs serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "lexcourt/index.hpp"
#include "lexcourt/retrieval.hpp"
#include "lexcourt/statutes.hpp"
#include "lexcourt/synthetic.hpp"

using namespace lexcourt;

namespace {

struct Fixture {
    SyntheticCollection syn = generate_synthetic_collection(7, 600, 4000, 0.8);
    StatuteCatalog catalog = StatuteCatalog::from_titles(syn.statute_titles);
    PassageAnnotations annotations = annotate_collection(syn.collection, catalog);
    Index index = build(Execution::parallel);

    Index build(Execution execution) const {
        IndexBuildOptions opt;
        opt.catalog = catalog;
        opt.execution = execution;
        return Index::build(syn.collection, &annotations, opt);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_Annotate(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(annotate_collection(f.syn.collection, f.catalog, mode(state)));
}

void BM_IndexBuild(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(f.build(mode(state)));
}

void BM_RunQueries(benchmark::State& state) {
    const auto& f = fixture();
    RetrievalConfig cfg;
    cfg.fusion.statute_boost = 1.0;
    const auto& queries = f.syn.collection.query_order;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_queries(f.index, f.syn.collection, queries, cfg, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}

}  // namespace

BENCHMARK(BM_Annotate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndexBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunQueries)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
