#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gridblock/executor.hpp"
#include "gridblock/program.hpp"
#include "gridblock/task.hpp"

namespace support
{

inline std::string fixture(const std::string & name)
{
  const std::string path = std::string(GRIDBLOCK_TEST_DATA) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline const gridblock::TaskSpec & task(std::string_view id)
{
  const auto * t = gridblock::find_builtin(id);
  if (!t) throw std::runtime_error("no builtin " + std::string(id));
  return *t;
}

inline gridblock::ExecutionTrace run_fixture(const std::string & name, const gridblock::TaskSpec & t)
{
  return gridblock::execute(gridblock::lower(gridblock::parse_program(fixture(name), t.catalog), t.grid), t);
}

// Random valid programs for round-trip and determinism properties.
class ProgramGen
{
public:
  explicit ProgramGen(std::uint32_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  gridblock::BlockProgram program()
  {
    using namespace gridblock;
    BlockProgram p;
    const int procs = uniform(0, 3);
    std::vector<std::string> names;
    // Procedure k may only call procedures with a smaller index, so the
    // call graph stays acyclic.
    for (int k = 0; k < procs; ++k) {
      std::string name = "proc_" + std::to_string(k) + (uniform(0, 1) ? "" : "_a&b<c>");
      p.procedures[name] = list(2, names);
      names.push_back(name);
    }
    p.main = list(3, names);
    return p;
  }

private:
  gridblock::StatementList list(int depth, const std::vector<std::string> & callable)
  {
    gridblock::StatementList out;
    const int n = uniform(0, 5);
    for (int i = 0; i < n; ++i) out.push_back(statement(depth, callable));
    return out;
  }

  double number()
  {
    switch (uniform(0, 3)) {
      case 0: return uniform(1, 1000);
      case 1: return uniform(1, 4000) / 8.0;
      case 2: return std::uniform_real_distribution<double>(0.001, 500.0)(rng_);
      default: return uniform(1, 9) / 10.0;
    }
  }

  gridblock::Statement statement(int depth, const std::vector<std::string> & callable)
  {
    using namespace gridblock;
    const int kind = uniform(0, depth > 0 ? 6 : 4);
    switch (kind) {
      case 0: return {Move{static_cast<RelDir>(uniform(0, 3)), number(), number()}};
      case 1: return {Turn{static_cast<Side>(uniform(0, 1)), uniform(0, 1) ? 90 : 180}};
      case 2:
        return {KnightMove{
          static_cast<Side>(uniform(0, 1)), static_cast<KnightDirY>(uniform(0, 1)), uniform(0, 3), uniform(0, 3),
          static_cast<LegOrder>(uniform(0, 1))}};
      case 3: {
        static const char * items[] = {"wolf", "goat", "cabbage", "a b", "x<y>&\"z\""};
        return {Pick{items[uniform(0, 4)]}};
      }
      case 4: return {Place{}};
      case 5: return {RepeatLoop{uniform(0, 12), list(depth - 1, callable)}};
      default:
        if (callable.empty()) return {Place{}};
        return {ProcCall{callable[static_cast<std::size_t>(uniform(0, static_cast<int>(callable.size()) - 1))]}};
    }
  }

  std::mt19937 rng_;
};

}  // namespace support
