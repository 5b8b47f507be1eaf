#include "otma/experiments.hpp"
#include "otma/oracle.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace otma;

namespace {

Problem ellipse_problem(int n) { return build_experiment_problem(ellipse_spec(), n, n); }

void BM_Residual(benchmark::State& state)
{
    const Problem p = ellipse_problem(static_cast<int>(state.range(0)));
    const GridFunction u = initial_guess(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_residual(u, p));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.values.size()));
}
BENCHMARK(BM_Residual)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state)
{
    const Problem p = ellipse_problem(static_cast<int>(state.range(0)));
    const GridFunction u = initial_guess(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_jacobian(u, p));
    }
}
BENCHMARK(BM_Jacobian)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Hamiltonian(benchmark::State& state)
{
    const ConvexTarget y = ConvexTarget::sampled_circle(Vec2::Zero(), 1.0, 256);
    const SupportTable table(y, DirectionSet::uniform(0.0491));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const Vec2 p(d(rng), d(rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hamiltonian(p, table));
    }
}
BENCHMARK(BM_Hamiltonian);

void BM_Assignment(benchmark::State& state)
{
    const auto m = static_cast<std::size_t>(state.range(0));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    DiscreteMeasure a, b;
    for (std::size_t k = 0; k < m; ++k) {
        a.points.emplace_back(d(rng), d(rng));
        b.points.emplace_back(d(rng), d(rng));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_assignment(a, b));
    }
}
BENCHMARK(BM_Assignment)->Arg(50)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
