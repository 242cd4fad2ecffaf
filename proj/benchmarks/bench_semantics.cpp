#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "inspectre/consistency.hpp"
#include "inspectre/explore.hpp"
#include "inspectre/inorder.hpp"
#include "inspectre/predictors.hpp"
#include "inspectre/random_program.hpp"
#include "inspectre/security.hpp"

namespace inspectre {
namespace {

Scenario corpus(const std::string& file) { return Scenario::from_isa(load_isa_file(INSPECTRE_CORPUS_DIR "/" + file)); }

void BM_EnabledSteps(benchmark::State& state) {
    const OooState init = corpus("spectre_pht.isa").initial();
    for (auto _ : state) benchmark::DoNotOptimize(enabled(init));
}
BENCHMARK(BM_EnabledSteps);

void BM_InOrderRun(benchmark::State& state) {
    const OooState init = corpus("spectre_pht.isa").initial();
    for (auto _ : state) benchmark::DoNotOptimize(run_inorder(init, 400).trace());
}
BENCHMARK(BM_InOrderRun);

void BM_OutOfOrderTraceSet(benchmark::State& state) {
    const OooState init = corpus("spectre_pht.isa").initial();
    ExploreLimits limits;
    limits.depth = static_cast<std::size_t>(state.range(0));
    ExploreStats stats;
    for (auto _ : state) benchmark::DoNotOptimize(trace_set(init, Semantics::out_of_order(), limits, &stats).size());
    state.counters["states"] = static_cast<double>(stats.nodes);
}
BENCHMARK(BM_OutOfOrderTraceSet)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_SpeculativeTraceSet(benchmark::State& state) {
    const OooState init = corpus("spectre_pht.isa").initial();
    const Semantics sem = Semantics::speculative(make_config({"br"}, {}));
    ExploreLimits limits;
    limits.depth = static_cast<std::size_t>(state.range(0));
    ExploreStats stats;
    for (auto _ : state) benchmark::DoNotOptimize(trace_set(init, sem, limits, &stats).size());
    state.counters["states"] = static_cast<double>(stats.nodes);
}
BENCHMARK(BM_SpeculativeTraceSet)->Arg(10)->Arg(14)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_NoninterferenceBoundsCheck(benchmark::State& state) {
    const Scenario sc = corpus("spectre_pht.isa");
    const Semantics sem = Semantics::speculative(make_config({"br"}, {}));
    NiOptions opts;
    opts.limits.depth = 14;
    for (auto _ : state) benchmark::DoNotOptimize(check_conditional_ni(sc, sem, opts).secure());
}
BENCHMARK(BM_NoninterferenceBoundsCheck)->Unit(benchmark::kMillisecond);

void BM_RandomSpeculativeRun(benchmark::State& state) {
    std::mt19937_64 gen(7);
    const OooState init = Scenario::from_isa(random_program(gen)).initial();
    const SpecConfig cfg = make_config({"stl"}, {});
    const SpecState h = spec_initial(init);
    std::mt19937_64 rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(random_spec_run(h, cfg, 200, rng).steps.size());
}
BENCHMARK(BM_RandomSpeculativeRun);

void BM_LoadDeps(benchmark::State& state) {
    const OooState init = corpus("stl.isa").initial();
    std::mt19937_64 rng(3);
    const OooRun run = random_ooo_run(init, 30, rng);
    const OooState& st = run.states.back();
    std::vector<Name> loads;
    st.for_each_micro([&](const Micro& m) {
        if (m.is_load()) loads.push_back(m.name);
    });
    for (auto _ : state) {
        for (Name t : loads) benchmark::DoNotOptimize(deps(st, t));
    }
    state.counters["loads"] = static_cast<double>(loads.size());
}
BENCHMARK(BM_LoadDeps);

}  // namespace
}  // namespace inspectre

BENCHMARK_MAIN();
