#include <doctest.h>

#include <array>
#include <map>
#include <random>

#include "gridblock/oracles.hpp"
#include "gridblock/pipeline.hpp"
#include "support.hpp"

using namespace gridblock;

namespace
{

constexpr int kInf = 1 << 20;

// All-pairs distances by Floyd-Warshall, independent of the BFS under test.
std::array<std::array<int, 25>, 25> floyd(const std::set<Cell> & obstacles)
{
  std::array<std::array<int, 25>, 25> d{};
  for (auto & row : d) row.fill(kInf);
  auto id = [](Cell c) { return c.y * 5 + c.x; };
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      const Cell c{x, y};
      if (obstacles.count(c)) continue;
      d[id(c)][id(c)] = 0;
      for (Cell n : {Cell{x + 1, y}, Cell{x, y + 1}}) {
        if (n.x > 4 || n.y > 4 || obstacles.count(n)) continue;
        d[id(c)][id(n)] = d[id(n)][id(c)] = 1;
      }
    }
  }
  for (int k = 0; k < 25; ++k)
    for (int i = 0; i < 25; ++i)
      for (int j = 0; j < 25; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Iterative deepening over crossing sequences; returns the fewest crossings.
struct RiverState
{
  std::map<std::string, int> side;  // 0 near, 1 far
  int robot = 0;
};

bool unsafe(const RiverState & s, int bank)
{
  auto on = [&](const char * item) { return s.side.count(item) && s.side.at(item) == bank; };
  return (on("wolf") && on("goat")) || (on("goat") && on("cabbage"));
}

bool river_dfs(RiverState & s, int depth, bool safety)
{
  bool done = true;
  for (const auto & [item, b] : s.side) done = done && b == 1;
  if (done) return true;
  if (depth == 0) return false;
  std::vector<std::string> choices{""};
  for (const auto & [item, b] : s.side) {
    if (b == s.robot) choices.push_back(item);
  }
  for (const auto & carry : choices) {
    const int from = s.robot;
    if (!carry.empty()) s.side[carry] = 1 - from;
    s.robot = 1 - from;
    const bool ok = !safety || !unsafe(s, from);
    if (ok && river_dfs(s, depth - 1, safety)) return true;
    s.robot = from;
    if (!carry.empty()) s.side[carry] = from;
  }
  return false;
}

int fewest_crossings(const std::vector<std::string> & items, bool safety)
{
  for (int depth = 0; depth < 20; ++depth) {
    RiverState s;
    for (const auto & i : items) s.side[i] = 0;
    if (river_dfs(s, depth, safety)) return depth;
  }
  return -1;
}

ActionSequence walk(const std::vector<int> & dirs)
{
  static const RelDir kDirs[] = {RelDir::Forward, RelDir::Backward, RelDir::Left, RelDir::Right};
  ActionSequence a;
  for (int d : dirs) a.push_back(Translate{kDirs[d], 1});
  return a;
}

// Shortest accepted walk by exhaustive enumeration, replayed through the executor.
int shortest_accepted_walk(const TaskSpec & t, int max_len)
{
  for (int len = 0; len <= max_len; ++len) {
    std::vector<int> dirs(len, 0);
    while (true) {
      const auto tr = execute(walk(dirs), t);
      if (check(tr, {}, t).is_correct) return len;
      int i = 0;
      while (i < len && dirs[i] == 3) dirs[i++] = 0;
      if (i == len) break;
      ++dirs[i];
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("shortest path examples")
{
  const auto & realm = support::task(task_ids::kSecretRealm);
  CHECK(shortest_path_len(realm, {1, 1}, {4, 3}) == 5);
  CHECK(shortest_path_len(realm, {4, 3}, {4, 2}) == 1);
  CHECK(shortest_path_len(realm, {4, 2}, {4, 1}) == 1);
  CHECK(shortest_path_len(realm, {2, 2}, {2, 2}) == 0);
  CHECK_FALSE(shortest_path_len(realm, {1, 1}, {1, 3}).has_value());
}

TEST_CASE("shortest path agrees with Floyd-Warshall on random boards")
{
  std::mt19937 rng(3);
  std::bernoulli_distribution blocked(0.25);
  int violations = 0;
  for (int round = 0; round < 60; ++round) {
    TaskSpec world = support::task(task_ids::kSecretRealm);
    world.obstacles.clear();
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        if (blocked(rng)) world.obstacles.insert({x, y});
    const auto d = floyd(world.obstacles);
    for (int a = 0; a < 25; ++a) {
      for (int b = 0; b < 25; ++b) {
        const Cell from{a % 5, a / 5}, to{b % 5, b / 5};
        if (world.obstacles.count(from)) continue;
        const auto got = shortest_path_len(world, from, to);
        const bool reachable = d[a][b] < kInf;
        if (got.has_value() != reachable || (got && *got != d[a][b])) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("the secret realm path is a concatenation of shortest legs")
{
  const auto & t = support::task(task_ids::kSecretRealm);
  const auto & path = std::get<FollowExactCellPath>(t.success).path;
  const auto d = floyd(t.obstacles);
  auto id = [](Cell c) { return c.y * 5 + c.x; };
  // start -> C -> A -> B
  CHECK(d[id({1, 1})][id({4, 2})] + d[id({4, 2})][id({4, 3})] + d[id({4, 3})][id({4, 1})] == 7);
  CHECK(path.size() - 1 == 7);
  // the visit order A, B, C is longer than what the path does
  CHECK(d[id({1, 1})][id({4, 3})] + d[id({4, 3})][id({4, 1})] + d[id({4, 1})][id({4, 2})] == 8);
}

TEST_CASE("river solver finds the classical seven crossings")
{
  const auto & t = support::task(task_ids::kRiverCrossing);
  const auto plan = river_solver(t);
  REQUIRE(plan);
  CHECK(plan->size() == 7);
  CHECK(static_cast<int>(plan->size()) == fewest_crossings(t.items, true));
  CHECK(plan->front().carried == "goat");
  CHECK(plan->back().carried == "goat");
  for (std::size_t i = 0; i < plan->size(); ++i) {
    CHECK((*plan)[i].from == (i % 2 == 0 ? Bank::Left : Bank::Right));
    CHECK((*plan)[i].to != (*plan)[i].from);
  }
}

TEST_CASE("river solver without safety rules")
{
  auto t = with_policy_overrides(support::task(task_ids::kRiverCrossing), nlohmann::json{{"safetyRulesOn", false}});
  const auto plan = river_solver(t);
  REQUIRE(plan);
  CHECK(plan->size() == 5);
  CHECK(static_cast<int>(plan->size()) == fewest_crossings(t.items, false));
  CHECK(evaluate(plan_to_program(*plan, t), t).verdict.is_correct);
}

TEST_CASE("river solver edge cases")
{
  auto t = support::task(task_ids::kRiverCrossing);
  t.items.clear();
  const auto none = river_solver(t);
  REQUIRE(none);
  CHECK(none->empty());

  CHECK_THROWS_AS(river_solver(support::task(task_ids::kTileCleaning)), std::invalid_argument);

  auto single = support::task(task_ids::kRiverCrossing);
  single.items = {"goat"};
  CHECK(river_solver(single)->size() == 1);
}

TEST_CASE("river plan replays as an accepted program")
{
  const auto & t = support::task(task_ids::kRiverCrossing);
  const auto plan = *river_solver(t);
  const auto program = plan_to_program(plan, t);
  CHECK(lower(program, t.grid) == plan_to_actions(plan, t));
  const auto e = evaluate(serialize_program(program), t);
  CHECK(e.verdict.is_correct);
  CHECK(e.trace.faults.empty());

  std::size_t picks = 0, places = 0;
  for (const auto & ev : e.trace.events) {
    picks += std::holds_alternative<ItemPicked>(ev.what);
    places += std::holds_alternative<ItemPlaced>(ev.what);
  }
  CHECK(picks == 5);
  CHECK(places == 5);

  const auto j = plan_to_json(plan);
  REQUIRE(j.size() == 7);
  CHECK(j[1]["carry"].is_null());
  CHECK(j[0]["from"] == "left");
}

TEST_CASE("mineral route search")
{
  const auto & t = support::task(task_ids::kMineral);
  const auto route = mineral_route_search(t);
  REQUIRE(route);
  CHECK(route->front() == t.start.cell);
  CHECK(static_cast<int>(route->size()) - 1 == shortest_accepted_walk(t, 7));

  const auto program = path_to_program(t.start, *route);
  const auto e = evaluate(program, t);
  CHECK(e.verdict.is_correct);
  CHECK(e.trace.visited == *route);
  REQUIRE(e.trace.final_energy());
  CHECK(*e.trace.final_energy() > 0);
}

TEST_CASE("mineral route search reports impossible layouts")
{
  auto t = support::task(task_ids::kMineral);
  t.initial_energy = 1;
  CHECK_FALSE(mineral_route_search(t).has_value());
  CHECK(shortest_accepted_walk(t, 5) == -1);

  auto walled = support::task(task_ids::kMineral);
  walled.obstacles = {{0, 3}, {1, 4}, {1, 2}, {2, 3}};
  CHECK_FALSE(mineral_route_search(walled).has_value());
}

TEST_CASE("path_to_program merges runs")
{
  const Pose start{{0, 0}, Orientation::North};
  const auto p = path_to_program(start, {{0, 0}, {0, 1}, {0, 2}, {1, 2}});
  REQUIRE(p.main.size() == 2);
  CHECK(lower(p) == ActionSequence{Translate{RelDir::Forward, 2}, Translate{RelDir::Right, 1}});
  CHECK(path_to_program(start, {{0, 0}}).main.empty());
}

TEST_CASE("tile cleaning reference program")
{
  const auto p = tile_cleaning_reference();
  CHECK(p == parse_program(support::fixture("tile_cleaning_reference.xml")));
  CHECK(evaluate(p, support::task(task_ids::kTileCleaning)).verdict.is_correct);
}

TEST_CASE("knight reference check with default options")
{
  const auto r = knight_reference_check();
  CHECK(r.passed);
  CHECK(r.covered_cells == 22);
  CHECK(r.assertions.size() == 5);
  for (const auto & a : r.assertions) {
    INFO(a.name << ": " << a.detail);
    CHECK(a.ok);
  }
  CHECK(knight_reference_actions().size() == 7);
  CHECK(lower(parse_program(support::fixture("knights_reference.xml"))) == knight_reference_actions());
  const auto j = knight_report_to_json(r);
  CHECK(j["passed"] == true);
}

TEST_CASE("knight reference check when only landings count")
{
  const auto r = knight_reference_check({false, false});
  CHECK_FALSE(r.passed);
  CHECK(r.covered_cells == 15);
  bool coverage_failed = false;
  for (const auto & a : r.assertions) {
    if (a.name == "covers_all_free_cells") coverage_failed = !a.ok;
  }
  CHECK(coverage_failed);
}

TEST_CASE("knight reference tour never crosses an obstacle")
{
  const auto r = knight_reference_check({true, true});
  CHECK(r.passed);
  CHECK(r.trace.faults.empty());
}
