#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>

#include "ovi/membranes.hpp"
#include "ovi/obstacle.hpp"

using namespace ovi;

namespace {

DiscreteOperator make(int n, double p, Scheme s) {
  return DiscreteOperator(StructuredGrid::rect({0.0, 1.0, 0.0, 1.0}, n), YoungFunction(std::make_shared<PowerLaw>(p)), s);
}

Field wavy(const GridPtr& g) {
  return Field::sample(g, [](Point x) { return std::sin(3.1 * x.x) * std::sin(2.3 * x.y) * x.x * (1 - x.x) * x.y * (1 - x.y); });
}

void BM_Residual(benchmark::State& state) {
  const auto op = make(static_cast<int>(state.range(0)), 3.0, static_cast<Scheme>(state.range(1)));
  const Field u = wavy(op.grid()), f(op.grid(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(op.residual(u, f));
  state.SetItemsProcessed(state.iterations() * op.grid()->node_count());
}
BENCHMARK(BM_Residual)->ArgsProduct({{33, 65, 129}, {0, 1}});

void BM_Hessian(benchmark::State& state) {
  const auto op = make(static_cast<int>(state.range(0)), 3.0, Scheme::edge);
  const Field u = wavy(op.grid());
  for (auto _ : state) benchmark::DoNotOptimize(op.internal_hessian(u));
}
BENCHMARK(BM_Hessian)->Arg(33)->Arg(65)->Arg(129);

void BM_TwoObstacle(benchmark::State& state) {
  const auto op = make(static_cast<int>(state.range(0)), 1.5, Scheme::edge);
  const GridPtr g = op.grid();
  const Field f = Field::sample(g, [](Point x) { return 40.0 * (x.x - 0.5); });
  const Field phi = Field::sample(g, [](Point x) { return 0.3 * x.x * (1 - x.x) * x.y * (1 - x.y); });
  const ObstacleProblem prob{f, -1.0 * phi, phi};
  for (auto _ : state) benchmark::DoNotOptimize(solve_two_obstacle(op, prob));
}
BENCHMARK(BM_TwoObstacle)->Arg(17)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_ProjectOrdered(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> base(static_cast<std::size_t>(state.range(0)));
  for (double& v : base) v = d(rng);
  std::vector<double> work;
  for (auto _ : state) {
    work = base;
    project_ordered(work);
    benchmark::DoNotOptimize(work.data());
  }
}
BENCHMARK(BM_ProjectOrdered)->Arg(2)->Arg(4)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
