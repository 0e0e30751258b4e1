// task.hpp - declarative task worlds and their success rules
#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridblock/grid.hpp"
#include "gridblock/program.hpp"

namespace gridblock
{

struct Trigger
{
  std::string label;
  Cell cell;

  bool operator==(const Trigger &) const = default;
};

/// Shape requirements on the submitted program (tile cleaning only).
struct StructuralChecks
{
  int procedure_body_steps = 4;
  std::int64_t loop_times = 2;

  bool operator==(const StructuralChecks &) const = default;
};

struct CoverAllCells
{
  std::set<Cell> exceptions;
  std::optional<StructuralChecks> structural;

  bool operator==(const CoverAllCells &) const = default;
};

struct FollowExactCellPath
{
  std::vector<Cell> path;

  bool operator==(const FollowExactCellPath &) const = default;
};

struct CollectAllMinerals
{
  int min_final_energy_exclusive = 0;

  bool operator==(const CollectAllMinerals &) const = default;
};

struct TransportAllItems
{
  Cell to;
  bool safety = true;

  bool operator==(const TransportAllItems &) const = default;
};

struct KnightFullCover
{
  Cell goal;
  std::set<Cell> exceptions;

  bool operator==(const KnightFullCover &) const = default;
};

using SuccessRule =
  std::variant<CoverAllCells, FollowExactCellPath, CollectAllMinerals, TransportAllItems, KnightFullCover>;

struct TaskPolicies
{
  /// Knight expansions record their two intermediate cells as visited.
  /// When false only the corner and landing cells are recorded.
  bool knight_intermediates_count = true;
  /// Obstacles also block the cells a knight move passes over.
  bool knight_intermediates_block = true;
  /// Wolf/goat/cabbage bank safety rules in river tasks.
  bool safety_rules_on = true;
  /// OutOfBounds stops the run; otherwise the move is dropped and the run goes on.
  bool halt_on_oob = true;
  /// Entering a cell already recorded as visited is a RevisitViolation.
  bool revisit_check = false;

  bool operator==(const TaskPolicies &) const = default;
};

struct TaskSpec
{
  std::string id;
  std::string title;
  GridConstants grid;
  Pose start;
  std::set<Cell> obstacles;
  std::set<Cell> minerals;
  std::set<Cell> swamps;
  std::vector<Trigger> triggers;
  std::vector<Cell> river;  // ordered from the near (pick-up) end to the far (drop-off) end
  std::vector<std::string> items;
  std::optional<Cell> right_bank;
  std::set<Cell> forbidden;
  std::optional<int> initial_energy;
  BlockCatalog catalog;
  SuccessRule success;
  TaskPolicies policies;

  bool operator==(const TaskSpec &) const = default;
};

namespace task_ids
{
inline constexpr std::string_view kTileCleaning = "tile-cleaning";
inline constexpr std::string_view kSecretRealm = "secret-realm";
inline constexpr std::string_view kMineral = "mineral";
inline constexpr std::string_view kRiverCrossing = "river-crossing";
inline constexpr std::string_view kKnightsTour = "knights-tour";
}  // namespace task_ids

/// The five studio tasks in curriculum order: tile cleaning, secret realm,
/// mineral collection, river crossing, knight's tour.
const std::vector<TaskSpec> & builtin_tasks();

/// Built-in task by id, or nullptr.
const TaskSpec * find_builtin(std::string_view id);

class TaskLoadError : public std::runtime_error
{
public:
  enum class Kind { SchemaViolation, GeometryInvalid };

  TaskLoadError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Load a task file (JSON text). Throws TaskLoadError.
TaskSpec load_task(std::string_view document);
TaskSpec load_task(const nlohmann::json & document);

nlohmann::ordered_json task_to_json(const TaskSpec & t);

/// Geometry invariants; empty when the task is consistent.
std::vector<std::string> geometry_problems(const TaskSpec & t);

/// Apply a policies object (same keys as the task file's "policies") on top of t.
TaskSpec with_policy_overrides(TaskSpec t, const nlohmann::json & overrides);

std::string_view success_kind(const SuccessRule & rule);

}  // namespace gridblock
