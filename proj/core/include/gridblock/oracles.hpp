// oracles.hpp - brute-force searches used to cross-check the engine
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridblock/executor.hpp"
#include "gridblock/program.hpp"
#include "gridblock/task.hpp"

namespace gridblock
{

/// Breadth-first search over 4-neighbours avoiding obstacles. nullopt when
/// `to` cannot be reached (including when it is an obstacle).
std::optional<int> shortest_path_len(const TaskSpec & world, Cell from, Cell to);

struct Crossing
{
  std::optional<std::string> carried;  // nullopt for an empty crossing
  Bank from = Bank::Left;
  Bank to = Bank::Right;

  bool operator==(const Crossing &) const = default;
};

using CrossingPlan = std::vector<Crossing>;

/**
 * Minimum-crossing plan moving every item to the far bank. States are item
 * locations plus the robot's bank; with safety rules on, the bank the robot
 * leaves must not pair wolf with goat or goat with cabbage. nullopt when no
 * plan exists. Throws std::invalid_argument for tasks without a river.
 */
std::optional<CrossingPlan> river_solver(const TaskSpec & t);

/// Primitive actions realizing `plan` on t's river (pick, turn around, cross, place).
ActionSequence plan_to_actions(const CrossingPlan & plan, const TaskSpec & t);

/// Block program whose lowering equals plan_to_actions(plan, t).
BlockProgram plan_to_program(const CrossingPlan & plan, const TaskSpec & t);

/**
 * Shortest cell route (start cell first) that collects every mineral and
 * ends with energy above the task's bound, searching over (cell, energy,
 * collected set). nullopt when none exists.
 */
std::optional<std::vector<Cell>> mineral_route_search(const TaskSpec & t);

/// Program that walks `cells` (adjacent, first = start) with translations
/// only, merging runs in the same direction.
BlockProgram path_to_program(const Pose & start, const std::vector<Cell> & cells);

struct KnightCheckOptions
{
  bool intermediates_count = true;
  bool intermediates_block = false;
};

struct Assertion
{
  std::string name;
  bool ok = false;
  std::string detail;
};

struct KnightReport
{
  bool passed = false;
  std::size_t covered_cells = 0;
  std::vector<Assertion> assertions;
  ExecutionTrace trace;
};

/// Two-row sweep procedure called twice from a loop, then one last row;
/// covers the tile-cleaning board from (0,0) facing East.
BlockProgram tile_cleaning_reference();

/// The published seven-move reference tour from (0,0) to (3,0).
ActionSequence knight_reference_actions();

/// Replays the reference tour on the built-in knight task and checks
/// coverage, uniqueness, obstacle avoidance and the goal.
KnightReport knight_reference_check(const KnightCheckOptions & options = {});

nlohmann::ordered_json plan_to_json(const CrossingPlan & plan);
nlohmann::ordered_json knight_report_to_json(const KnightReport & r);

}  // namespace gridblock
