#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "gridblock/executor.hpp"
#include "gridblock/pipeline.hpp"
#include "gridblock/program.hpp"
#include "gridblock/task.hpp"

using namespace gridblock;

namespace
{

std::string load(const std::string & name)
{
  std::ifstream in(std::string(GRIDBLOCK_BENCH_DATA) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const std::pair<const char *, std::string_view> kGoldens[] = {
  {"tile_cleaning_reference.xml", task_ids::kTileCleaning},
  {"secret_realm_turns.xml", task_ids::kSecretRealm},
  {"mineral_corrected.xml", task_ids::kMineral},
  {"river_classical.xml", task_ids::kRiverCrossing},
  {"knights_reference.xml", task_ids::kKnightsTour},
};

void BM_Parse(benchmark::State & state)
{
  const auto & [file, id] = kGoldens[state.range(0)];
  const auto xml = load(file);
  const auto & catalog = find_builtin(id)->catalog;
  for (auto _ : state) benchmark::DoNotOptimize(parse_program(xml, catalog));
  state.SetLabel(file);
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * xml.size()));
}
BENCHMARK(BM_Parse)->DenseRange(0, 4);

void BM_Serialize(benchmark::State & state)
{
  const auto p = parse_program(load("river_classical.xml"));
  for (auto _ : state) benchmark::DoNotOptimize(serialize_program(p));
}
BENCHMARK(BM_Serialize);

void BM_LowerExecute(benchmark::State & state)
{
  const auto & [file, id] = kGoldens[state.range(0)];
  const auto & t = *find_builtin(id);
  const auto p = parse_program(load(file), t.catalog);
  for (auto _ : state) benchmark::DoNotOptimize(execute(lower(p, t.grid), t));
  state.SetLabel(file);
}
BENCHMARK(BM_LowerExecute)->DenseRange(0, 4);

void BM_Evaluate(benchmark::State & state)
{
  const auto & [file, id] = kGoldens[state.range(0)];
  const auto & t = *find_builtin(id);
  const auto xml = load(file);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(std::string_view(xml), t));
  state.SetLabel(file);
}
BENCHMARK(BM_Evaluate)->DenseRange(0, 4);

// A long unrolled program: repeat N { forward 1, backward 1 } on the tile board.
void BM_ExecuteUnrolled(benchmark::State & state)
{
  const auto & t = *find_builtin(task_ids::kTileCleaning);
  BlockProgram p;
  p.main = {{RepeatLoop{state.range(0), {{Move{RelDir::Left, 300, 1}}, {Move{RelDir::Right, 300, 1}}}}}};
  const auto actions = lower(p, t.grid);
  for (auto _ : state) benchmark::DoNotOptimize(execute(actions, t));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * actions.size()));
}
BENCHMARK(BM_ExecuteUnrolled)->Range(8, 4096);

}  // namespace

BENCHMARK_MAIN();
