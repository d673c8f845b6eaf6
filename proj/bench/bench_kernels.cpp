#include <benchmark/benchmark.h>

#include <cmath>

#include "ifs/catalog.hpp"
#include "ifs/semigroup.hpp"

using namespace ifs;

namespace {

const IfsSystem& system_ms() {
    static const IfsSystem F = catalog_lookup("rotation-morse-smale").system;
    return F;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_HutchinsonStep(benchmark::State& state) {
    PointCloud net = PointCloud::full_net(1.0 / 4096);
    for (auto _ : state) benchmark::DoNotOptimize(hutchinson_step(system_ms(), net, exec_of(state)));
}

void BM_StrictAttractor(benchmark::State& state) {
    auto seeds = seed_grid(32);
    for (auto _ : state)
        benchmark::DoNotOptimize(strict_attractor_probe(system_ms(), 0.02, seeds, 100, 1.0 / 1024, exec_of(state)));
}

void BM_Minimality(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            certify_minimality(system_ms(), 0.02, 32, 200, Direction::Forward, kDefaultDelta, exec_of(state)));
}

void BM_Hausdorff(benchmark::State& state) {
    Rng rng(1);
    std::vector<double> a(2000), b(2000);
    for (double& x : a) x = rng.uniform();
    for (double& x : b) x = rng.uniform();
    PointCloud A(a, 1e-9), B(b, 1e-9);
    for (auto _ : state)
        benchmark::DoNotOptimize(state.range(0) ? hausdorff_distance(A, B) : hausdorff_distance_bruteforce(A, B));
}

}  // namespace

// Argument 0 is the serial reference, 1 the parallel kernel (sweep vs brute force for Hausdorff).
BENCHMARK(BM_HutchinsonStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrictAttractor)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Minimality)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hausdorff)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
