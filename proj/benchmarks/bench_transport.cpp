#include <benchmark/benchmark.h>

#include <rte_aot/recon.hpp>

using namespace rte_aot;

namespace
{
Domain const disk = Domain::disk({0, 0}, 1);

Medium reference_medium()
{
    return Medium(ScalarField::bumps(0.6, {{{0, 0}, 0.2, 0.1}}), ScatteringKernel::isotropic(ScalarField::constant(0.3)));
}

DiscretizationPtr disc_for(benchmark::State const& st)
{
    int nx = static_cast<int>(st.range(0));
    return make_discretization(disk, static_cast<int>(st.range(1)), nx, 4 * nx);
}

BoundarySource smooth_f()
{
    return BoundarySource::angular([](Vec2 th) { return 1 + 0.5 * th.x; });
}

void BM_Sweep(benchmark::State& st)
{
    auto d = disc_for(st);
    Transport t(reference_medium(), d);
    std::vector<double> src(d->field_size(), 1.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(t.sweep(src));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(d->field_size()));
}

void BM_A2(benchmark::State& st)
{
    auto d = disc_for(st);
    Transport t(reference_medium(), d);
    std::vector<double> w(d->field_size(), 1.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(t.a2_grid(w));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(d->field_size()));
}

void BM_SolveForward(benchmark::State& st)
{
    auto d = disc_for(st);
    Transport t(reference_medium(), d);
    for (auto _ : st)
        benchmark::DoNotOptimize(t.solve_forward(smooth_f()));
}

void BM_OpticalDepth(benchmark::State& st)
{
    auto m = reference_medium();
    double a = 0;
    for (auto _ : st)
    {
        a += 0.01;
        benchmark::DoNotOptimize(optical_depth(m, disk, {0.1, -0.2}, unit(a), 0.5, Orientation::forward));
    }
}

void BM_Discretize(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(disc_for(st));
}

}  // namespace

BENCHMARK(BM_Sweep)->Args({48, 32})->Args({96, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_A2)->Args({48, 32})->Args({96, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveForward)->Args({48, 32})->Args({96, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpticalDepth);
BENCHMARK(BM_Discretize)->Args({96, 64})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
