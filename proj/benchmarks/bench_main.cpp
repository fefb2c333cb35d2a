#include <benchmark/benchmark.h>

#include "isee/dynamics.hpp"
#include "isee/picard.hpp"
#include "isee/scenario.hpp"

using namespace isee;

namespace {

ProblemSpec demo_spec() { return build_problem(example_preset()); }

void BM_SampleIncrements(benchmark::State& state) {
    const ProblemSpec spec = demo_spec();
    const auto grid = build_grid(example_preset(), static_cast<std::size_t>(state.range(0)));
    std::uint64_t path = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_increments(spec.noise, grid, 1, path++));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(grid.size() - 1) *
                            spec.noise.modes());
}
BENCHMARK(BM_SampleIncrements)->Arg(128)->Arg(512);

void BM_SimulatePath(benchmark::State& state) {
    const ScenarioConfig cfg = example_preset();
    const ProblemSpec spec = build_problem(cfg);
    const auto grid = build_grid(cfg, static_cast<std::size_t>(state.range(0)));
    const ControlSignal u = initial_control(cfg);
    const GridKernel kernel(spec, u, grid);
    std::uint64_t path = 0;
    for (auto _ : state) {
        const NoisePath noise = sample_increments(spec.noise, grid, 2, path++);
        benchmark::DoNotOptimize(kernel.run(noise));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(grid.size() - 1));
}
BENCHMARK(BM_SimulatePath)->Arg(128)->Arg(512);

void BM_SemigroupApply(benchmark::State& state) {
    const ProblemSpec spec = demo_spec();
    Vector y = Vector::Ones(spec.state_dim());
    for (auto _ : state) {
        y = semigroup_apply(spec.sg, 1e-3, y);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_SemigroupApply);

void BM_PicardSweeps(benchmark::State& state) {
    const ScenarioConfig cfg = example_preset();
    const ProblemSpec spec = build_problem(cfg);
    const auto grid = build_grid(cfg, 64);
    const ControlSignal u = initial_control(cfg);
    std::vector<NoisePath> noise;
    for (std::size_t p = 0; p < 16; ++p)
        noise.push_back(sample_increments(spec.noise, grid, 3, p));
    for (auto _ : state) {
        benchmark::DoNotOptimize(picard_solve(spec, u, noise, spec.y0, 1e-10, 8));
    }
}
BENCHMARK(BM_PicardSweeps);

}  // namespace

BENCHMARK_MAIN();
