#include <benchmark/benchmark.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "swarmsearch/experiments.hpp"
#include "swarmsearch/spatial_index.hpp"

using namespace swarm;

namespace {

// Clustered layout like a searching group: 500 agents over a few km.
std::vector<Vec2> layout(int n) {
    RngStream rng(1, 0);
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i) pos.push_back({rng.uniform(8000, 12000), rng.uniform(8000, 12000)});
    return pos;
}

double seconds_now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

const TorusSpec kWorld(20000.0);
constexpr double kRadius = 150.0;

std::size_t grid_pass(CellGrid& grid, const std::vector<Vec2>& pos, std::vector<NeighborHit>& hits) {
    grid.rebuild(pos);
    std::size_t total = 0;
    for (int i = 0; i < static_cast<int>(pos.size()); ++i) {
        hits.clear();
        grid.neighbors_within(pos[i], kRadius, i, hits);
        total += hits.size();
    }
    return total;
}

std::size_t quadratic_pass(const std::vector<Vec2>& pos) {
    std::size_t total = 0;
    for (int i = 0; i < static_cast<int>(pos.size()); ++i) {
        total += neighbors_within_bruteforce(pos, pos[i], kRadius, i, kWorld).size();
    }
    return total;
}

void BM_GridRebuildQuery(benchmark::State& state) {
    const auto pos = layout(static_cast<int>(state.range(0)));
    CellGrid grid(kWorld, kRadius);
    std::vector<NeighborHit> hits;
    for (auto _ : state) benchmark::DoNotOptimize(grid_pass(grid, pos, hits));
}
BENCHMARK(BM_GridRebuildQuery)->Arg(100)->Arg(500)->Arg(2000);

void BM_QuadraticScan(benchmark::State& state) {
    const auto pos = layout(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(quadratic_pass(pos));
}
BENCHMARK(BM_QuadraticScan)->Arg(100)->Arg(500)->Arg(2000);

SimConfig batch_config() {
    SimConfig c;
    c.side_length = 3000.0;
    c.n = 20;
    c.rho = 0.2;
    return c;
}

void BM_BatchSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(batch_config(), 16, 7));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& state) {
    BatchOptions opts;
    opts.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(batch_config(), 16, 7, opts));
}
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

// Median-of-runs timing of both n=500 passes; the grid must be >= 10x faster.
int check_speedup() {
    const auto pos = layout(500);
    CellGrid grid(kWorld, kRadius);
    std::vector<NeighborHit> hits;
    auto time_of = [](auto&& fn) {
        std::vector<double> t;
        for (int r = 0; r < 15; ++r) {
            const auto t0 = seconds_now();
            benchmark::DoNotOptimize(fn());
            t.push_back(seconds_now() - t0);
        }
        std::sort(t.begin(), t.end());
        return t[t.size() / 2];
    };
    if (grid_pass(grid, pos, hits) != quadratic_pass(pos)) {
        std::printf("grid and quadratic neighbor counts differ\n");
        return 1;
    }
    const double g = time_of([&] { return grid_pass(grid, pos, hits); });
    const double q = time_of([&] { return quadratic_pass(pos); });
    const double speedup = q / g;
    std::printf("n=500 grid %.1f us, quadratic %.1f us, speedup %.1fx (need >= 10x): %s\n", g * 1e6, q * 1e6, speedup,
                speedup >= 10.0 ? "PASS" : "FAIL");
    return speedup >= 10.0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    bool check_only = false;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--check") check_only = true;
    }
    const int rc = check_speedup();
    if (check_only) return rc;
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return rc;
}
