#include <benchmark/benchmark.h>

#include "episim/abm.hpp"
#include "episim/clustering.hpp"
#include "episim/correlation.hpp"
#include "episim/deployment.hpp"
#include "episim/models.hpp"

using namespace episim;

static void BM_Kernel(benchmark::State& state) {
    const KernelParams kp{9.0};
    double d = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel(d, kp));
        d += 0.001;
        if (d >= 9.0) d = 0.0;
    }
}
BENCHMARK(BM_Kernel);

static void BM_BuildMatrix(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto dep = generate_deployment(n, 150.0, 150.0, 4.5, 9.0, 42);
    for (auto _ : state) {
        auto m = build_matrix(dep, KernelParams{9.0});
        benchmark::DoNotOptimize(m.rho.data());
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_BuildMatrix)->Arg(100)->Arg(200)->Arg(500)->Complexity(benchmark::oNSquared);

static void BM_OverlapMc(benchmark::State& state) {
    const auto samples = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(overlap_fraction_mc(3.0, 4.5, samples, 7));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples));
}
BENCHMARK(BM_OverlapMc)->Arg(1 << 16)->Arg(1 << 20);

static void BM_Integrate(benchmark::State& state) {
    SiParams p;
    p.beta = 0.3;
    p.sigma = 0.5;
    p.r_t = 4.0;
    p.n_total = 200.0;
    p.i0 = 1.0;
    for (auto _ : state) {
        auto traj = integrate(ModelKind::CorrelatedSi, p, 20.0, 1e-3);
        benchmark::DoNotOptimize(traj.samples.data());
    }
}
BENCHMARK(BM_Integrate);

static void BM_BuildSets(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto dep = generate_deployment(n, 100.0, 100.0, 5.0, 10.0, 11);
    auto m = build_matrix(dep, KernelParams{10.0});
    for (auto _ : state) {
        auto r = build_sets(dep, m, 0.2);
        benchmark::DoNotOptimize(r.sets.data());
    }
}
BENCHMARK(BM_BuildSets)->Arg(100)->Arg(300);

static void BM_AbmStep(benchmark::State& state) {
    auto dep = generate_deployment(500, 100.0, 100.0, 2.0, 10.0, 2024);
    AbmConfig cfg;
    cfg.deployment = &dep;
    cfg.si.beta = 0.1;
    cfg.si.sigma = dep.density();
    cfg.si.r_t = dep.r_t;
    cfg.si.n_total = 500.0;
    cfg.steps = 50;
    cfg.replications = 1;
    cfg.base_seed = 1;
    cfg.event_center = Point2{50.0, 50.0};
    cfg.event_radius = 8.0;
    cfg.dt = 0.1;
    for (auto _ : state) {
        auto result = run(cfg);
        benchmark::DoNotOptimize(result.i_mean.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cfg.steps));
}
BENCHMARK(BM_AbmStep);

BENCHMARK_MAIN();
