#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lbnn/atlas.hpp"
#include "lbnn/ga.hpp"
#include "lbnn/kernel.hpp"

using namespace lbnn;

namespace {

struct Batch {
    std::vector<Genome> genomes;
    std::vector<Environment> envs;
};

Batch make_batch(int population)
{
    Engine rng(1);
    Batch b;
    for (int i = 0; i < population; ++i)
        b.genomes.push_back(random_genome(5, rng));
    for (int i = 0; i < 5; ++i)
        b.envs.push_back(sample_environment(rng));
    return b;
}

NetworkSpec dense_spec(int n)
{
    std::mt19937_64 gen(4);
    NetworkSpec s = NetworkSpec::empty(n, 1, hebb_rule());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s.set_cell(i, j, gen() % 3 == 0 ? WeightCell::learnable() : WeightCell::fixed(spin_of(gen() & 1)));
    return s;
}

} // namespace

static void BM_population_serial(benchmark::State& state)
{
    const Batch b = make_batch(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_population_serial(b.genomes, b.envs, 0.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_population_serial)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_population_parallel(benchmark::State& state)
{
    const Batch b = make_batch(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_population(b.genomes, b.envs, 0.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_population_parallel)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_step_reference(benchmark::State& state)
{
    const NetworkSpec s = dense_spec(static_cast<int>(state.range(0)));
    const ClampSet c = ClampSet::input(s, Spin::Plus);
    NetworkState st = random_state(s, 3);
    for (auto _ : state) {
        st = step(s, st, c);
        benchmark::DoNotOptimize(st);
    }
}
BENCHMARK(BM_step_reference)->Arg(5)->Arg(8);

static void BM_step_packed(benchmark::State& state)
{
    const Kernel k(dense_spec(static_cast<int>(state.range(0))));
    const PackedClamp c = k.clamp_input(Spin::Plus);
    PackedState st = k.random_state(3);
    for (auto _ : state) {
        st = k.step(st, c);
        benchmark::DoNotOptimize(st);
    }
}
BENCHMARK(BM_step_packed)->Arg(5)->Arg(8);

static void BM_orbits(benchmark::State& state)
{
    const StateSpace space(dense_spec(6));
    const auto clamp = space.kernel().clamp_input(Spin::Plus);
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(find_orbits(space, clamp, default_state_cap_bits, workers));
}
BENCHMARK(BM_orbits)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
