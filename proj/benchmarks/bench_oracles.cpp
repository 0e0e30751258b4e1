#include <benchmark/benchmark.h>

#include "gridblock/oracles.hpp"
#include "gridblock/task.hpp"

using namespace gridblock;

namespace
{

void BM_RiverSolver(benchmark::State & state)
{
  const auto & t = *find_builtin(task_ids::kRiverCrossing);
  for (auto _ : state) benchmark::DoNotOptimize(river_solver(t));
}
BENCHMARK(BM_RiverSolver);

void BM_MineralRouteSearch(benchmark::State & state)
{
  const auto & t = *find_builtin(task_ids::kMineral);
  for (auto _ : state) benchmark::DoNotOptimize(mineral_route_search(t));
}
BENCHMARK(BM_MineralRouteSearch);

void BM_ShortestPath(benchmark::State & state)
{
  const auto & t = *find_builtin(task_ids::kSecretRealm);
  for (auto _ : state) benchmark::DoNotOptimize(shortest_path_len(t, {1, 1}, {4, 3}));
}
BENCHMARK(BM_ShortestPath);

void BM_KnightReferenceCheck(benchmark::State & state)
{
  for (auto _ : state) benchmark::DoNotOptimize(knight_reference_check());
}
BENCHMARK(BM_KnightReferenceCheck);

}  // namespace

BENCHMARK_MAIN();
