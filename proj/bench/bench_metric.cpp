#include <benchmark/benchmark.h>

#include "hk/geometry.hpp"

using namespace hk;

namespace {

struct Fixture {
    Bridge B;
    HKFrame F;
    std::vector<Eigen::VectorXd> xs;

    Fixture() {
        Dims d(1, 1, 0);
        PAlgebra P(d);
        ZKey k = 2 * zunit(2) + 2 * zunit(3);
        Series L = Series::term(1, 6, k, HarmonicPoly::constant(GaussQ::rational(1, 10)));
        F = build_canonical_frame(P, validate_prepotential(L, d), &B);
        xs = chart_sample(4, 64, 0.1, 5);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_ChartPoints(benchmark::State& state) {
    const Fixture& f = fixture();
    ChartOptions o;
    o.points = int(state.range(0));
    o.parallel = state.range(1) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(integrate_manifold(f.F, f.B, o));
    state.SetLabel(o.parallel ? "openmp" : "serial");
}

void BM_MetricSamples(benchmark::State& state) {
    const Fixture& f = fixture();
    ChartOptions o;
    o.points = 1;
    ManifoldChart C = integrate_manifold(f.F, f.B, o);
    std::vector<Eigen::VectorXd> xs(f.xs.begin(), f.xs.begin() + state.range(0));
    const bool parallel = state.range(1) != 0;
    for (auto _ : state) {
        std::vector<MetricSample> r(xs.size());
        // evaluate_metric rather than metric_at: the quartic samples fail the route check
        if (parallel) {
#pragma omp parallel for schedule(static)
            for (int i = 0; i < int(xs.size()); ++i) r[i] = evaluate_metric(C, xs[i]);
        } else {
            for (int i = 0; i < int(xs.size()); ++i) r[i] = evaluate_metric(C, xs[i]);
        }
        benchmark::DoNotOptimize(r);
    }
    state.SetLabel(parallel ? "openmp" : "serial");
}

}  // namespace

BENCHMARK(BM_ChartPoints)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MetricSamples)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
