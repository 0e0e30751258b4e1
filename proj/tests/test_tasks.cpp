#include <doctest.h>

#include "gridblock/task.hpp"
#include "support.hpp"

using namespace gridblock;

namespace
{

TaskLoadError::Kind load_error(const std::string & doc)
{
  try {
    load_task(std::string_view(doc));
  } catch (const TaskLoadError & e) {
    return e.kind();
  }
  FAIL("expected TaskLoadError for " << doc);
  return TaskLoadError::Kind::SchemaViolation;
}

}  // namespace

TEST_CASE("five built-in tasks in curriculum order")
{
  const auto & all = builtin_tasks();
  REQUIRE(all.size() == 5);
  CHECK(all[0].id == "tile-cleaning");
  CHECK(all[1].id == "secret-realm");
  CHECK(all[2].id == "mineral");
  CHECK(all[3].id == "river-crossing");
  CHECK(all[4].id == "knights-tour");
  CHECK(find_builtin("nope") == nullptr);
}

TEST_CASE("tile cleaning layout")
{
  const auto & t = builtin_tasks()[0];
  CHECK(t.start == Pose{{0, 0}, Orientation::East});
  const auto * rule = std::get_if<CoverAllCells>(&t.success);
  REQUIRE(rule);
  CHECK(rule->exceptions.empty());
  REQUIRE(rule->structural);
  CHECK(rule->structural->procedure_body_steps == 4);
  CHECK(rule->structural->loop_times == 2);
}

TEST_CASE("secret realm layout")
{
  const auto & t = builtin_tasks()[1];
  CHECK(t.start == Pose{{1, 1}, Orientation::North});
  CHECK(t.triggers == std::vector<Trigger>{{"A", {4, 3}}, {"B", {4, 1}}, {"C", {4, 2}}});
  CHECK(t.obstacles == std::set<Cell>{{0, 4}, {0, 2}, {1, 3}, {2, 1}, {3, 1}, {3, 3}});
  const auto & path = std::get<FollowExactCellPath>(t.success).path;
  CHECK(path == std::vector<Cell>{{1, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {4, 3}, {4, 2}, {4, 1}});
  for (auto c : path) CHECK_FALSE(t.obstacles.count(c));
  for (std::size_t i = 1; i < path.size(); ++i) {
    CHECK(std::abs(path[i].x - path[i - 1].x) + std::abs(path[i].y - path[i - 1].y) == 1);
  }
  CHECK_FALSE(t.policies.revisit_check);
}

TEST_CASE("mineral layout")
{
  const auto & t = builtin_tasks()[2];
  CHECK(t.start == Pose{{0, 0}, Orientation::North});
  CHECK(t.initial_energy == 6);
  CHECK(t.minerals == std::set<Cell>{{1, 0}, {1, 3}, {3, 3}});
  CHECK(t.swamps == std::set<Cell>{{0, 2}, {2, 2}, {2, 3}, {2, 4}});
  CHECK(std::get<CollectAllMinerals>(t.success).min_final_energy_exclusive == 0);
}

TEST_CASE("river layout")
{
  const auto & t = builtin_tasks()[3];
  CHECK(t.start == Pose{{0, 0}, Orientation::West});
  CHECK(t.river == std::vector<Cell>{{0, 0}, {1, 0}, {2, 0}});
  CHECK(t.items == std::vector<std::string>{"wolf", "goat", "cabbage"});
  CHECK(t.right_bank == Cell{3, 0});
  CHECK(t.forbidden == std::set<Cell>{{3, 0}});
  CHECK(t.policies.safety_rules_on);
}

TEST_CASE("knights tour layout")
{
  const auto & t = builtin_tasks()[4];
  CHECK(t.start == Pose{{0, 0}, Orientation::North});
  CHECK(t.obstacles == std::set<Cell>{{3, 1}, {4, 3}, {4, 4}});
  const auto & rule = std::get<KnightFullCover>(t.success);
  CHECK(rule.goal == Cell{3, 0});
  CHECK(25 - static_cast<int>(t.obstacles.size()) == 22);
  CHECK(t.policies.knight_intermediates_count);
  CHECK_FALSE(t.policies.knight_intermediates_block);
  CHECK(t.policies.revisit_check);
}

TEST_CASE("every built-in round trips through the task file format")
{
  for (const auto & t : builtin_tasks()) {
    const auto text = task_to_json(t).dump(2);
    CHECK(load_task(std::string_view(text)) == t);
    CHECK(geometry_problems(t).empty());
  }
}

TEST_CASE("mineral layout written by hand loads equal to the built-in")
{
  const std::string doc = R"({
    "id": "mineral",
    "title": ")" + builtin_tasks()[2].title + R"(",
    "start": {"x": 0, "y": 0, "orientation": "North"},
    "minerals": [[1,0],[1,3],[3,3]],
    "swamps": [[0,2],[2,2],[2,3],[2,4]],
    "energy": 6,
    "catalog": )" + nlohmann::json(builtin_tasks()[2].catalog.type_names()).dump() + R"(,
    "success": {"kind": "collect_all_minerals"}
  })";
  CHECK(load_task(std::string_view(doc)) == builtin_tasks()[2]);
}

TEST_CASE("task file errors")
{
  const std::string start = R"("start": {"x": 0, "y": 0, "orientation": "North"})";
  const std::string success = R"("success": {"kind": "cover_all_cells"})";
  CHECK(load_error(R"({"id": "m", )" + start + R"(, "minerals": [[7,7]], )" + success + "}") ==
        TaskLoadError::Kind::GeometryInvalid);
  CHECK(load_error(R"({"id": "m", )" + start + "}") == TaskLoadError::Kind::SchemaViolation);
  CHECK(load_error(R"({"id": "m", )" + success + "}") == TaskLoadError::Kind::SchemaViolation);
  CHECK(load_error(R"({)" + start + ", " + success + "}") == TaskLoadError::Kind::SchemaViolation);
  CHECK(load_error("{not json") == TaskLoadError::Kind::SchemaViolation);
  CHECK(load_error(R"({"id": "m", )" + start + ", " + success + R"(, "colour": "red"})") ==
        TaskLoadError::Kind::SchemaViolation);
  CHECK(load_error(R"({"id": "m", )" + start + ", " + success + R"(, "obstacles": [[0,0]]})") ==
        TaskLoadError::Kind::GeometryInvalid);
  CHECK(load_error(R"({"id": "m", )" + start + ", " + success + R"(, "minerals": [[2,2]], "obstacles": [[2,2]]})") ==
        TaskLoadError::Kind::GeometryInvalid);
  CHECK(load_error(R"({"id": "m", )" + start + R"(, "success": {"kind": "follow_exact_path", "path": [[0,0],[2,0]]}})") ==
        TaskLoadError::Kind::GeometryInvalid);
  CHECK(load_error(R"({"id": "m", )" + start + R"(, "success": {"kind": "win"}})") ==
        TaskLoadError::Kind::SchemaViolation);
}

TEST_CASE("minimal custom task")
{
  const auto t = load_task(std::string_view(
    R"({"id": "corridor", "start": {"x": 0, "y": 0, "orientation": "East"},
        "success": {"kind": "follow_exact_path", "path": [[0,0],[1,0],[2,0]]}})"));
  CHECK(t.title == "corridor");
  CHECK(t.grid == GridConstants{});
  CHECK(t.catalog.admits("move_forward"));
  CHECK(success_kind(t.success) == "follow_exact_path");
}

TEST_CASE("policy overrides")
{
  const auto t = with_policy_overrides(builtin_tasks()[3], nlohmann::json{{"safetyRulesOn", false}});
  CHECK_FALSE(t.policies.safety_rules_on);
  CHECK(t.policies.halt_on_oob);
  CHECK_THROWS_AS(with_policy_overrides(builtin_tasks()[3], nlohmann::json{{"fly", true}}), TaskLoadError);
}
