#include "gridblock/task.hpp"

#include <algorithm>
#include <cstdlib>

namespace gridblock
{

using nlohmann::json;
using nlohmann::ordered_json;

namespace
{

std::vector<std::string> movement_blocks()
{
  return {
    std::string(blocks::kMoveForward), std::string(blocks::kMoveBackward), std::string(blocks::kMoveLeft),
    std::string(blocks::kMoveRight),   std::string(blocks::kTurnLeft),     std::string(blocks::kTurnRight),
    std::string(blocks::kRepeat),      std::string(blocks::kProcDef),      std::string(blocks::kProcCall),
  };
}

std::vector<std::string> plus(std::vector<std::string> base, std::initializer_list<std::string_view> extra)
{
  for (auto e : extra) base.emplace_back(e);
  return base;
}

std::vector<TaskSpec> make_builtins()
{
  std::vector<TaskSpec> tasks;

  {
    TaskSpec t;
    t.id = task_ids::kTileCleaning;
    t.title = "Tile Cleaning";
    t.start = {{0, 0}, Orientation::East};
    t.catalog = BlockCatalog::of(movement_blocks());
    t.success = CoverAllCells{{}, StructuralChecks{}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.id = task_ids::kSecretRealm;
    t.title = "Adventure in the Secret Realm";
    t.start = {{1, 1}, Orientation::North};
    t.triggers = {{"A", {4, 3}}, {"B", {4, 1}}, {"C", {4, 2}}};
    t.obstacles = {{0, 4}, {0, 2}, {1, 3}, {2, 1}, {3, 1}, {3, 3}};
    t.catalog = BlockCatalog::of(movement_blocks());
    t.success = FollowExactCellPath{{{1, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {4, 3}, {4, 2}, {4, 1}}};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.id = task_ids::kMineral;
    t.title = "Mineral Collection";
    t.start = {{0, 0}, Orientation::North};
    t.minerals = {{1, 0}, {1, 3}, {3, 3}};
    t.swamps = {{0, 2}, {2, 2}, {2, 3}, {2, 4}};
    t.initial_energy = 6;
    t.catalog = BlockCatalog::of(movement_blocks());
    t.success = CollectAllMinerals{0};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.id = task_ids::kRiverCrossing;
    t.title = "Wolf, Goat, and Cabbage";
    t.start = {{0, 0}, Orientation::West};
    t.river = {{0, 0}, {1, 0}, {2, 0}};
    t.items = {"wolf", "goat", "cabbage"};
    t.right_bank = Cell{3, 0};
    t.forbidden = {{3, 0}};
    t.catalog = BlockCatalog::of(plus(movement_blocks(), {blocks::kPickItem, blocks::kPlaceItem}));
    t.success = TransportAllItems{{3, 0}, true};
    tasks.push_back(std::move(t));
  }
  {
    TaskSpec t;
    t.id = task_ids::kKnightsTour;
    t.title = "Knight's Tour";
    t.start = {{0, 0}, Orientation::North};
    t.obstacles = {{3, 1}, {4, 3}, {4, 4}};
    t.catalog = BlockCatalog::of(plus(movement_blocks(), {blocks::kMoveKnight}));
    t.success = KnightFullCover{{3, 0}, t.obstacles};
    t.policies.knight_intermediates_block = false;
    t.policies.revisit_check = true;
    tasks.push_back(std::move(t));
  }
  return tasks;
}

[[noreturn]] void schema(const std::string & msg) { throw TaskLoadError(TaskLoadError::Kind::SchemaViolation, msg); }

ordered_json cell_json(Cell c) { return ordered_json::array({c.x, c.y}); }

template <class Range>
ordered_json cells_json(const Range & cells)
{
  auto arr = ordered_json::array();
  for (const auto & c : cells) arr.push_back(cell_json(c));
  return arr;
}

Cell read_cell(const json & j, const std::string & what)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    schema(what + " must be an [x, y] integer pair");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<Cell> read_cell_list(const json & j, const std::string & what)
{
  if (!j.is_array()) schema(what + " must be an array of [x, y] pairs");
  std::vector<Cell> out;
  for (const auto & c : j) out.push_back(read_cell(c, what));
  return out;
}

std::set<Cell> read_cell_set(const json & j, const std::string & what)
{
  auto list = read_cell_list(j, what);
  return {list.begin(), list.end()};
}

void check_keys(const json & obj, std::initializer_list<std::string_view> allowed, const std::string & what)
{
  if (!obj.is_object()) schema(what + " must be an object");
  for (const auto & [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema("unknown key '" + key + "' in " + what);
    }
  }
}

bool read_bool(const json & j, const std::string & what)
{
  if (!j.is_boolean()) schema(what + " must be a boolean");
  return j.get<bool>();
}

int read_int(const json & j, const std::string & what)
{
  if (!j.is_number_integer()) schema(what + " must be an integer");
  return j.get<int>();
}

std::string read_string(const json & j, const std::string & what)
{
  if (!j.is_string()) schema(what + " must be a string");
  return j.get<std::string>();
}

TaskPolicies read_policies(TaskPolicies p, const json & j)
{
  check_keys(
    j, {"knightIntermediatesCount", "knightIntermediatesBlock", "safetyRulesOn", "haltOnOOB", "revisitCheck"},
    "policies");
  if (j.contains("knightIntermediatesCount"))
    p.knight_intermediates_count = read_bool(j["knightIntermediatesCount"], "knightIntermediatesCount");
  if (j.contains("knightIntermediatesBlock"))
    p.knight_intermediates_block = read_bool(j["knightIntermediatesBlock"], "knightIntermediatesBlock");
  if (j.contains("safetyRulesOn")) p.safety_rules_on = read_bool(j["safetyRulesOn"], "safetyRulesOn");
  if (j.contains("haltOnOOB")) p.halt_on_oob = read_bool(j["haltOnOOB"], "haltOnOOB");
  if (j.contains("revisitCheck")) p.revisit_check = read_bool(j["revisitCheck"], "revisitCheck");
  return p;
}

SuccessRule read_success(const json & j)
{
  if (!j.is_object() || !j.contains("kind")) schema("success must be an object with a kind");
  const auto kind = read_string(j["kind"], "success.kind");
  if (kind == "cover_all_cells") {
    check_keys(j, {"kind", "exceptions", "structural"}, "success");
    CoverAllCells rule;
    if (j.contains("exceptions")) rule.exceptions = read_cell_set(j["exceptions"], "success.exceptions");
    if (j.contains("structural") && !j["structural"].is_null()) {
      const auto & s = j["structural"];
      check_keys(s, {"procedureBodySteps", "loopTimes"}, "success.structural");
      StructuralChecks checks;
      if (s.contains("procedureBodySteps"))
        checks.procedure_body_steps = read_int(s["procedureBodySteps"], "procedureBodySteps");
      if (s.contains("loopTimes")) checks.loop_times = read_int(s["loopTimes"], "loopTimes");
      rule.structural = checks;
    }
    return rule;
  }
  if (kind == "follow_exact_path") {
    check_keys(j, {"kind", "path"}, "success");
    if (!j.contains("path")) schema("follow_exact_path needs a path");
    return FollowExactCellPath{read_cell_list(j["path"], "success.path")};
  }
  if (kind == "collect_all_minerals") {
    check_keys(j, {"kind", "minFinalEnergyExclusive"}, "success");
    CollectAllMinerals rule;
    if (j.contains("minFinalEnergyExclusive"))
      rule.min_final_energy_exclusive = read_int(j["minFinalEnergyExclusive"], "minFinalEnergyExclusive");
    return rule;
  }
  if (kind == "transport_all_items") {
    check_keys(j, {"kind", "to", "safety"}, "success");
    if (!j.contains("to")) schema("transport_all_items needs a destination 'to'");
    TransportAllItems rule;
    rule.to = read_cell(j["to"], "success.to");
    if (j.contains("safety")) rule.safety = read_bool(j["safety"], "success.safety");
    return rule;
  }
  if (kind == "knight_full_cover") {
    check_keys(j, {"kind", "goal", "exceptions"}, "success");
    if (!j.contains("goal")) schema("knight_full_cover needs a goal");
    KnightFullCover rule;
    rule.goal = read_cell(j["goal"], "success.goal");
    if (j.contains("exceptions")) rule.exceptions = read_cell_set(j["exceptions"], "success.exceptions");
    return rule;
  }
  schema("unknown success kind '" + kind + "'");
}

ordered_json success_json(const SuccessRule & rule)
{
  ordered_json j;
  j["kind"] = success_kind(rule);
  std::visit(
    [&](const auto & r) {
      using R = std::decay_t<decltype(r)>;
      if constexpr (std::is_same_v<R, CoverAllCells>) {
        j["exceptions"] = cells_json(r.exceptions);
        if (r.structural) {
          j["structural"] = ordered_json{
            {"procedureBodySteps", r.structural->procedure_body_steps}, {"loopTimes", r.structural->loop_times}};
        } else {
          j["structural"] = nullptr;
        }
      } else if constexpr (std::is_same_v<R, FollowExactCellPath>) {
        j["path"] = cells_json(r.path);
      } else if constexpr (std::is_same_v<R, CollectAllMinerals>) {
        j["minFinalEnergyExclusive"] = r.min_final_energy_exclusive;
      } else if constexpr (std::is_same_v<R, TransportAllItems>) {
        j["to"] = cell_json(r.to);
        j["safety"] = r.safety;
      } else if constexpr (std::is_same_v<R, KnightFullCover>) {
        j["goal"] = cell_json(r.goal);
        j["exceptions"] = cells_json(r.exceptions);
      }
    },
    rule);
  return j;
}

}  // namespace

const std::vector<TaskSpec> & builtin_tasks()
{
  static const std::vector<TaskSpec> tasks = make_builtins();
  return tasks;
}

const TaskSpec * find_builtin(std::string_view id)
{
  for (const auto & t : builtin_tasks()) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::string_view success_kind(const SuccessRule & rule)
{
  switch (rule.index()) {
    case 0: return "cover_all_cells";
    case 1: return "follow_exact_path";
    case 2: return "collect_all_minerals";
    case 3: return "transport_all_items";
    case 4: return "knight_full_cover";
  }
  return "?";
}

std::vector<std::string> geometry_problems(const TaskSpec & t)
{
  std::vector<std::string> problems;
  const auto & g = t.grid;
  auto on_grid = [&](Cell c, const std::string & what) {
    if (!g.contains(c)) problems.push_back(what + " " + format_cell(c) + " lies off the grid");
  };
  if (g.size < 1 || g.size > 64) problems.push_back("grid size must be between 1 and 64");
  if (!(g.cell_size_mm > 0.0)) problems.push_back("cell size must be positive");

  on_grid(t.start.cell, "start");
  for (auto c : t.obstacles) on_grid(c, "obstacle");
  for (auto c : t.minerals) on_grid(c, "mineral");
  for (auto c : t.swamps) on_grid(c, "swamp");
  for (const auto & tr : t.triggers) on_grid(tr.cell, "trigger " + tr.label);
  for (auto c : t.river) on_grid(c, "river cell");
  if (t.right_bank) on_grid(*t.right_bank, "right bank");
  for (auto c : t.forbidden) on_grid(c, "forbidden cell");

  if (t.obstacles.count(t.start.cell)) problems.push_back("start cell is an obstacle");
  if (t.forbidden.count(t.start.cell)) problems.push_back("start cell is forbidden");
  for (auto c : t.minerals) {
    if (t.obstacles.count(c)) problems.push_back("mineral " + format_cell(c) + " sits on an obstacle");
  }
  for (const auto & tr : t.triggers) {
    if (t.obstacles.count(tr.cell)) problems.push_back("trigger " + tr.label + " sits on an obstacle");
  }
  if (t.initial_energy && *t.initial_energy < 0) problems.push_back("initial energy must not be negative");
  if (!t.items.empty() && (t.river.size() < 2 || !t.right_bank)) {
    problems.push_back("items need a river of at least two cells and a right bank");
  }
  for (std::size_t i = 1; i < t.river.size(); ++i) {
    const auto a = t.river[i - 1], b = t.river[i];
    if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) problems.push_back("river cells must be adjacent in order");
  }

  std::visit(
    [&](const auto & r) {
      using R = std::decay_t<decltype(r)>;
      if constexpr (std::is_same_v<R, FollowExactCellPath>) {
        if (r.path.empty()) problems.push_back("exact path must not be empty");
        for (auto c : r.path) on_grid(c, "path cell");
        for (std::size_t i = 1; i < r.path.size(); ++i) {
          const auto a = r.path[i - 1], b = r.path[i];
          if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) {
            problems.push_back("path steps " + format_cell(a) + "->" + format_cell(b) + " are not adjacent");
          }
        }
      } else if constexpr (std::is_same_v<R, KnightFullCover>) {
        on_grid(r.goal, "goal");
        for (auto c : r.exceptions) on_grid(c, "exception");
        if (t.obstacles.count(r.goal)) problems.push_back("goal sits on an obstacle");
      } else if constexpr (std::is_same_v<R, TransportAllItems>) {
        on_grid(r.to, "destination");
      } else if constexpr (std::is_same_v<R, CoverAllCells>) {
        for (auto c : r.exceptions) on_grid(c, "exception");
      }
    },
    t.success);
  return problems;
}

TaskSpec load_task(std::string_view document)
{
  json j;
  try {
    j = json::parse(document.begin(), document.end());
  } catch (const json::parse_error & e) {
    schema(std::string("task file is not valid JSON: ") + e.what());
  }
  return load_task(j);
}

TaskSpec load_task(const json & j)
{
  check_keys(
    j,
    {"id", "title", "grid", "start", "obstacles", "minerals", "swamps", "triggers", "river", "items", "rightBank",
     "forbidden", "energy", "success", "policies", "catalog"},
    "task");
  for (const char * key : {"id", "start", "success"}) {
    if (!j.contains(key)) schema(std::string("task file is missing required key '") + key + "'");
  }

  TaskSpec t;
  t.id = read_string(j["id"], "id");
  if (t.id.empty()) schema("id must not be empty");
  t.title = j.contains("title") ? read_string(j["title"], "title") : t.id;

  if (j.contains("grid")) {
    const auto & g = j["grid"];
    check_keys(g, {"size", "cellSize"}, "grid");
    if (g.contains("size")) t.grid.size = read_int(g["size"], "grid.size");
    if (g.contains("cellSize")) {
      if (!g["cellSize"].is_number()) schema("grid.cellSize must be a number");
      t.grid.cell_size_mm = g["cellSize"].get<double>();
    }
  }

  const auto & start = j["start"];
  check_keys(start, {"x", "y", "orientation"}, "start");
  if (!start.contains("x") || !start.contains("y")) schema("start needs x and y");
  t.start.cell = {read_int(start["x"], "start.x"), read_int(start["y"], "start.y")};
  if (start.contains("orientation")) {
    auto o = parse_orientation(read_string(start["orientation"], "start.orientation"));
    if (!o) schema("start.orientation must be North, East, South or West");
    t.start.facing = *o;
  }

  if (j.contains("obstacles")) t.obstacles = read_cell_set(j["obstacles"], "obstacles");
  if (j.contains("minerals")) t.minerals = read_cell_set(j["minerals"], "minerals");
  if (j.contains("swamps")) t.swamps = read_cell_set(j["swamps"], "swamps");
  if (j.contains("triggers")) {
    if (!j["triggers"].is_array()) schema("triggers must be an array");
    for (const auto & tr : j["triggers"]) {
      check_keys(tr, {"label", "cell"}, "trigger");
      if (!tr.contains("label") || !tr.contains("cell")) schema("trigger needs label and cell");
      t.triggers.push_back({read_string(tr["label"], "trigger.label"), read_cell(tr["cell"], "trigger.cell")});
    }
  }
  if (j.contains("river")) t.river = read_cell_list(j["river"], "river");
  if (j.contains("items")) {
    if (!j["items"].is_array()) schema("items must be an array of strings");
    for (const auto & it : j["items"]) t.items.push_back(read_string(it, "item"));
  }
  if (j.contains("rightBank") && !j["rightBank"].is_null()) t.right_bank = read_cell(j["rightBank"], "rightBank");
  if (j.contains("forbidden")) t.forbidden = read_cell_set(j["forbidden"], "forbidden");
  if (j.contains("energy") && !j["energy"].is_null()) t.initial_energy = read_int(j["energy"], "energy");

  t.success = read_success(j["success"]);
  if (std::holds_alternative<KnightFullCover>(t.success)) {
    // Knight tasks default to the permissive jump rule and revisit checking.
    t.policies.knight_intermediates_block = false;
    t.policies.revisit_check = true;
  }
  if (j.contains("policies")) t.policies = read_policies(t.policies, j["policies"]);

  if (j.contains("catalog")) {
    if (!j["catalog"].is_array()) schema("catalog must be an array of block types");
    std::vector<std::string> types;
    const auto full = BlockCatalog::full();
    for (const auto & b : j["catalog"]) {
      auto name = read_string(b, "catalog entry");
      if (!full.admits(name)) schema("catalog names unknown block type '" + name + "'");
      types.push_back(std::move(name));
    }
    t.catalog = BlockCatalog::of(types);
  } else {
    t.catalog = BlockCatalog::full();
  }

  if (auto problems = geometry_problems(t); !problems.empty()) {
    throw TaskLoadError(TaskLoadError::Kind::GeometryInvalid, problems.front());
  }
  return t;
}

ordered_json task_to_json(const TaskSpec & t)
{
  ordered_json j;
  j["id"] = t.id;
  j["title"] = t.title;
  j["grid"] = ordered_json{{"size", t.grid.size}, {"cellSize", t.grid.cell_size_mm}};
  j["start"] =
    ordered_json{{"x", t.start.cell.x}, {"y", t.start.cell.y}, {"orientation", std::string(to_string(t.start.facing))}};
  j["obstacles"] = cells_json(t.obstacles);
  j["minerals"] = cells_json(t.minerals);
  j["swamps"] = cells_json(t.swamps);
  auto triggers = ordered_json::array();
  for (const auto & tr : t.triggers) triggers.push_back(ordered_json{{"label", tr.label}, {"cell", cell_json(tr.cell)}});
  j["triggers"] = triggers;
  j["river"] = cells_json(t.river);
  j["items"] = t.items;
  j["rightBank"] = t.right_bank ? cell_json(*t.right_bank) : ordered_json(nullptr);
  j["forbidden"] = cells_json(t.forbidden);
  j["energy"] = t.initial_energy ? ordered_json(*t.initial_energy) : ordered_json(nullptr);
  j["success"] = success_json(t.success);
  j["policies"] = ordered_json{
    {"knightIntermediatesCount", t.policies.knight_intermediates_count},
    {"knightIntermediatesBlock", t.policies.knight_intermediates_block},
    {"safetyRulesOn", t.policies.safety_rules_on},
    {"haltOnOOB", t.policies.halt_on_oob},
    {"revisitCheck", t.policies.revisit_check},
  };
  j["catalog"] = t.catalog.type_names();
  return j;
}

TaskSpec with_policy_overrides(TaskSpec t, const json & overrides)
{
  t.policies = read_policies(t.policies, overrides);
  return t;
}

}  // namespace gridblock
