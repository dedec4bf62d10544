// Parallel vs serial winner search over a frozen node snapshot.

#include <random>

#include <benchmark/benchmark.h>

#include "bsssom/matrix.hpp"
#include "bsssom/params.hpp"
#include "bsssom/som_map.hpp"
#include "bsssom/winner_search.hpp"

namespace {

struct Fixture {
    bsssom::NodeSnapshot snapshot;
    bsssom::Matrix samples;
};

Fixture make_fixture(std::size_t rows, std::size_t nodes, std::size_t dim) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bsssom::Params p;
    p.max_nodes = nodes;
    p.minwd = 0.0;
    bsssom::SomMap map(dim, p);
    std::vector<double> x(dim);
    for (std::size_t j = 0; j < nodes; ++j) {
        for (double& v : x) v = u(rng);
        map.insert_node(x);
    }
    Fixture f{bsssom::NodeSnapshot::of(map), bsssom::Matrix(rows, dim)};
    for (std::size_t i = 0; i < rows; ++i) {
        for (double& v : f.samples.row(i)) v = u(rng);
    }
    return f;
}

void BM_FindWinnersParallel(benchmark::State& state) {
    const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bsssom::find_winners(f.snapshot, f.samples, 1e-8));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FindWinnersSerial(benchmark::State& state) {
    const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bsssom::find_winners_serial(f.snapshot, f.samples, 1e-8));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

// rows, nodes, dim
#define WINNER_ARGS ->Args({32, 100, 10})->Args({1024, 100, 10})->Args({5000, 500, 32})

BENCHMARK(BM_FindWinnersParallel) WINNER_ARGS;
BENCHMARK(BM_FindWinnersSerial) WINNER_ARGS;

}  // namespace

BENCHMARK_MAIN();
