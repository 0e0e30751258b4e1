#include "gridblock/oracles.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace gridblock
{

namespace
{

constexpr Delta kNeighbours[] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};

}  // namespace

std::optional<int> shortest_path_len(const TaskSpec & world, Cell from, Cell to)
{
  const auto & g = world.grid;
  if (!g.contains(from) || !g.contains(to) || world.obstacles.count(to) || world.obstacles.count(from)) {
    return std::nullopt;
  }
  std::map<Cell, int> dist{{from, 0}};
  std::deque<Cell> queue{from};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == to) return dist[c];
    for (auto d : kNeighbours) {
      const Cell n{c.x + d.dx, c.y + d.dy};
      if (!g.contains(n) || world.obstacles.count(n) || dist.count(n)) continue;
      dist[n] = dist[c] + 1;
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// River crossing

namespace
{

bool bank_safe(const std::vector<std::string> & items, unsigned mask_on_bank)
{
  auto has = [&](std::string_view name) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i] == name && (mask_on_bank >> i & 1u)) return true;
    }
    return false;
  };
  return !(has("wolf") && has("goat")) && !(has("goat") && has("cabbage"));
}

}  // namespace

std::optional<CrossingPlan> river_solver(const TaskSpec & t)
{
  if (t.river.size() < 2 || !t.right_bank) throw std::invalid_argument("task '" + t.id + "' has no river");
  const auto n = t.items.size();
  if (n > 16) throw std::invalid_argument("too many items for the river solver");
  if (n == 0) return CrossingPlan{};

  // bit i of `right` set: item i is on the far bank. Robot bank in bit n.
  const unsigned all = (1u << n) - 1;
  const unsigned robot_bit = 1u << n;
  struct Prev
  {
    unsigned state;
    Crossing move;
  };
  std::map<unsigned, Prev> prev;
  std::deque<unsigned> queue{0u};
  std::set<unsigned> seen{0u};
  const bool safety = t.policies.safety_rules_on;

  while (!queue.empty()) {
    const unsigned s = queue.front();
    queue.pop_front();
    const unsigned right = s & all;
    const bool robot_right = s & robot_bit;
    if (right == all) {
      CrossingPlan plan;
      for (unsigned cur = s; cur != 0u;) {
        const auto & p = prev.at(cur);
        plan.push_back(p.move);
        cur = p.state;
      }
      std::reverse(plan.begin(), plan.end());
      return plan;
    }

    // Carry nothing first, then each item on the robot's bank in task order.
    for (int choice = -1; choice < static_cast<int>(n); ++choice) {
      unsigned next_right = right;
      if (choice >= 0) {
        const bool item_right = right >> choice & 1u;
        if (item_right != robot_right) continue;
        next_right ^= 1u << choice;
      }
      // The bank being left behind is unattended.
      const unsigned left_behind = robot_right ? (next_right & all) : (~next_right & all);
      if (safety && !bank_safe(t.items, left_behind)) continue;
      const unsigned next = next_right | (robot_right ? 0u : robot_bit);
      if (!seen.insert(next).second) continue;
      Crossing move;
      if (choice >= 0) move.carried = t.items[static_cast<std::size_t>(choice)];
      move.from = robot_right ? Bank::Right : Bank::Left;
      move.to = robot_right ? Bank::Left : Bank::Right;
      prev[next] = {s, move};
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

ActionSequence plan_to_actions(const CrossingPlan & plan, const TaskSpec & t)
{
  ActionSequence out;
  const int span = static_cast<int>(t.river.size()) - 1;
  for (const auto & c : plan) {
    if (c.carried) out.push_back(PickAction{*c.carried});
    out.push_back(Rotate{Side::Left, 180});
    out.push_back(Translate{RelDir::Forward, span});
    if (c.carried) out.push_back(PlaceAction{});
  }
  return out;
}

BlockProgram plan_to_program(const CrossingPlan & plan, const TaskSpec & t)
{
  BlockProgram p;
  const double span = static_cast<double>(t.river.size() - 1);
  for (const auto & c : plan) {
    if (c.carried) p.main.push_back({Pick{*c.carried}});
    p.main.push_back({Turn{Side::Left, 180}});
    p.main.push_back({Move{RelDir::Forward, t.grid.cell_size_mm, span}});
    if (c.carried) p.main.push_back({Place{}});
  }
  return p;
}

// ---------------------------------------------------------------------------
// Mineral routes

std::optional<std::vector<Cell>> mineral_route_search(const TaskSpec & t)
{
  const auto & collect_rule = std::get_if<CollectAllMinerals>(&t.success);
  const int bound = collect_rule ? collect_rule->min_final_energy_exclusive : 0;
  const std::vector<Cell> minerals(t.minerals.begin(), t.minerals.end());
  if (minerals.size() > 16) throw std::invalid_argument("too many minerals for the route search");
  const unsigned all = (1u << minerals.size()) - 1;
  const bool tracked = t.initial_energy.has_value();

  struct State
  {
    Cell cell;
    int energy;
    unsigned got;
    auto operator<=>(const State &) const = default;
  };

  const State start{t.start.cell, t.initial_energy.value_or(0), 0u};
  std::map<State, State> prev;
  std::set<State> seen{start};
  std::deque<State> queue{start};
  while (!queue.empty()) {
    const State s = queue.front();
    queue.pop_front();
    if (s.got == all && (!tracked || s.energy > bound)) {
      std::vector<Cell> route{s.cell};
      for (State cur = s; !(cur == start);) {
        cur = prev.at(cur);
        route.push_back(cur.cell);
      }
      std::reverse(route.begin(), route.end());
      return route;
    }
    for (auto d : kNeighbours) {
      const Cell c{s.cell.x + d.dx, s.cell.y + d.dy};
      if (!t.grid.contains(c) || t.obstacles.count(c) || t.forbidden.count(c)) continue;
      State n{c, s.energy, s.got};
      const int cost = 1 + (t.swamps.count(c) ? 2 : 0);
      if (tracked) {
        if (n.energy < cost) continue;
        n.energy -= cost;
      }
      const auto it = std::find(minerals.begin(), minerals.end(), c);
      if (it != minerals.end()) {
        const unsigned bit = 1u << (it - minerals.begin());
        if (!(n.got & bit) && (!tracked || n.energy >= 1)) {
          n.got |= bit;
          if (tracked) n.energy += 2;
        }
      }
      if (!seen.insert(n).second) continue;
      prev.emplace(n, s);
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

BlockProgram path_to_program(const Pose & start, const std::vector<Cell> & cells)
{
  BlockProgram p;
  std::optional<RelDir> run_dir;
  int run = 0;
  auto flush = [&] {
    if (run_dir && run > 0) p.main.push_back({Move{*run_dir, 300.0, static_cast<double>(run)}});
    run = 0;
  };
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Delta d{cells[i].x - cells[i - 1].x, cells[i].y - cells[i - 1].y};
    std::optional<RelDir> dir;
    for (auto rel : {RelDir::Forward, RelDir::Backward, RelDir::Left, RelDir::Right}) {
      if (relative_to_global(start.facing, rel, 1) == d) dir = rel;
    }
    if (!dir) throw std::invalid_argument("route cells " + format_cell(cells[i - 1]) + " and " + format_cell(cells[i]) + " are not adjacent");
    if (dir != run_dir) {
      flush();
      run_dir = dir;
    }
    ++run;
  }
  flush();
  return p;
}

// ---------------------------------------------------------------------------
// Tile cleaning

BlockProgram tile_cleaning_reference()
{
  BlockProgram p;
  p.procedures["clean_2_rows"] = {
    {Move{RelDir::Forward, 300.0, 4.0}},
    {Move{RelDir::Left, 300.0, 1.0}},
    {Move{RelDir::Backward, 300.0, 4.0}},
    {Move{RelDir::Left, 300.0, 1.0}},
  };
  p.main = {
    {RepeatLoop{2, {{ProcCall{"clean_2_rows"}}}}},
    {Move{RelDir::Forward, 300.0, 4.0}},
  };
  return p;
}

// ---------------------------------------------------------------------------
// Knight reference tour

ActionSequence knight_reference_actions()
{
  struct Hop
  {
    Cell to;
    LegOrder order;
  };
  const Cell start{0, 0};
  const Hop hops[] = {
    {{2, 1}, LegOrder::XFirst}, {{0, 2}, LegOrder::XFirst}, {{1, 4}, LegOrder::YFirst}, {{2, 2}, LegOrder::YFirst},
    {{3, 4}, LegOrder::YFirst}, {{4, 2}, LegOrder::YFirst}, {{3, 0}, LegOrder::YFirst},
  };
  ActionSequence out;
  Cell at = start;
  for (const auto & h : hops) {
    // Facing stays North, so lateral = x and forward = +y.
    const int dx = h.to.x - at.x, dy = h.to.y - at.y;
    out.push_back(KnightStep{
      dx >= 0 ? Side::Right : Side::Left, dy >= 0 ? KnightDirY::Forward : KnightDirY::Backward, std::abs(dx),
      std::abs(dy), h.order});
    at = h.to;
  }
  return out;
}

KnightReport knight_reference_check(const KnightCheckOptions & options)
{
  TaskSpec t = *find_builtin(task_ids::kKnightsTour);
  t.policies.knight_intermediates_count = options.intermediates_count;
  t.policies.knight_intermediates_block = options.intermediates_block;
  const auto & rule = std::get<KnightFullCover>(t.success);

  KnightReport r;
  r.trace = execute(knight_reference_actions(), t);

  std::map<Cell, int> counts;
  for (auto c : r.trace.visited) ++counts[c];
  r.covered_cells = counts.size();
  const auto required = static_cast<std::size_t>(t.grid.size * t.grid.size) - rule.exceptions.size();

  auto add = [&](std::string name, bool ok, std::string detail) {
    r.assertions.push_back({std::move(name), ok, std::move(detail)});
  };
  add(
    "covers_all_free_cells", r.covered_cells == required,
    std::to_string(r.covered_cells) + " of " + std::to_string(required) + " cells covered");

  std::vector<Cell> repeated;
  for (const auto & [c, n] : counts) {
    if (n > 1) repeated.push_back(c);
  }
  add("each_cell_once", repeated.empty(), std::to_string(repeated.size()) + " cells covered more than once");

  bool obstacle_hit = false;
  for (const auto & f : r.trace.faults) obstacle_hit |= f.kind == FaultKind::ObstacleCollision;
  for (auto c : r.trace.visited) obstacle_hit |= t.obstacles.count(c) > 0;
  add("no_obstacle_landing", !obstacle_hit, obstacle_hit ? "an obstacle cell was entered" : "no obstacle entered");

  bool illegal = false;
  for (const auto & f : r.trace.faults) illegal |= f.kind == FaultKind::IllegalKnightMove;
  add("all_moves_legal", !illegal, illegal ? "an illegal knight move was recorded" : "all moves are L-shaped");

  const Cell last = r.trace.final_pose().cell;
  add("ends_at_goal", last == rule.goal, "tour ends at " + format_cell(last));

  r.passed = std::all_of(r.assertions.begin(), r.assertions.end(), [](const Assertion & a) { return a.ok; });
  return r;
}

nlohmann::ordered_json plan_to_json(const CrossingPlan & plan)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto & c : plan) {
    arr.push_back(nlohmann::ordered_json{
      {"carry", c.carried ? nlohmann::ordered_json(*c.carried) : nlohmann::ordered_json(nullptr)},
      {"from", c.from == Bank::Left ? "left" : "right"},
      {"to", c.to == Bank::Left ? "left" : "right"},
    });
  }
  return arr;
}

nlohmann::ordered_json knight_report_to_json(const KnightReport & r)
{
  nlohmann::ordered_json j;
  j["passed"] = r.passed;
  j["coveredCells"] = r.covered_cells;
  auto arr = nlohmann::ordered_json::array();
  for (const auto & a : r.assertions) arr.push_back({{"name", a.name}, {"ok", a.ok}, {"detail", a.detail}});
  j["assertions"] = arr;
  return j;
}

}  // namespace gridblock
