// executor.hpp - lowering block programs to primitives and simulating them
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridblock/grid.hpp"
#include "gridblock/program.hpp"
#include "gridblock/task.hpp"

namespace gridblock
{

struct Translate
{
  RelDir dir = RelDir::Forward;
  int cells = 0;

  bool operator==(const Translate &) const = default;
};

struct Rotate
{
  Side side = Side::Left;
  int degrees = 90;

  bool operator==(const Rotate &) const = default;
};

struct KnightStep
{
  Side dir_x = Side::Right;
  KnightDirY dir_y = KnightDirY::Forward;
  int steps_x = 0;
  int steps_y = 0;
  LegOrder leg_order = LegOrder::XFirst;

  bool operator==(const KnightStep &) const = default;
};

struct PickAction
{
  std::string item;

  bool operator==(const PickAction &) const = default;
};

struct PlaceAction
{
  bool operator==(const PlaceAction &) const = default;
};

using Action = std::variant<Translate, Rotate, KnightStep, PickAction, PlaceAction>;
using ActionSequence = std::vector<Action>;

inline constexpr std::size_t kUnrollBudget = 10'000;

class UnrollBudgetExceeded : public std::runtime_error
{
public:
  UnrollBudgetExceeded()
  : std::runtime_error("program unrolls to more than " + std::to_string(kUnrollBudget) + " primitive actions")
  {
  }
};

/// Inline procedure calls and unroll loops. Move blocks become Translate
/// with displacement_cells(speed, duration) cells.
ActionSequence lower(const BlockProgram & p, const GridConstants & grid = {});

// ---------------------------------------------------------------------------
// Trace

enum class FaultKind {
  OutOfBounds,
  ObstacleCollision,
  IllegalKnightMove,
  RevisitViolation,
  EnergyDepleted,
  ForbiddenCell,
  PickWithoutItem,
  PlaceWithoutCarry,
  WrongBankAction,
};

std::string_view to_string(FaultKind kind);

/// Faults after which no further primitive runs.
bool is_halting(FaultKind kind, const TaskPolicies & policies);

struct Fault
{
  FaultKind kind;
  std::size_t primitive_index = 0;
  std::size_t step_index = 0;
  Cell cell;
  std::string detail;

  bool operator==(const Fault &) const = default;
};

enum class Bank { Left, Right };

struct MineralCollected { Cell cell; bool operator==(const MineralCollected &) const = default; };
struct MineralSkippedNoEnergy { Cell cell; bool operator==(const MineralSkippedNoEnergy &) const = default; };
struct SwampEntered { Cell cell; bool operator==(const SwampEntered &) const = default; };
struct TriggerActivated
{
  std::string label;
  Cell cell;
  bool operator==(const TriggerActivated &) const = default;
};
struct ItemPicked
{
  std::string item;
  Cell cell;  // robot cell
  Bank from = Bank::Left;
  bool operator==(const ItemPicked &) const = default;
};
struct ItemPlaced
{
  std::string item;
  Cell cell;  // robot cell
  Bank to = Bank::Right;
  bool operator==(const ItemPlaced &) const = default;
};

struct Event
{
  std::variant<MineralCollected, MineralSkippedNoEnergy, SwampEntered, TriggerActivated, ItemPicked, ItemPlaced> what;
  std::size_t primitive_index = 0;
  std::size_t step_index = 0;

  bool operator==(const Event &) const = default;
};

Cell event_cell(const Event & e);
std::string_view event_name(const Event & e);

struct EnergyEntry
{
  enum class Reason { Move, Swamp, Collect, Restore };

  Reason reason;
  Cell cell;
  int delta = 0;
  int after = 0;
  std::size_t primitive_index = 0;
  std::size_t step_index = 0;

  bool operator==(const EnergyEntry &) const = default;
};

struct EnergyLedger
{
  int initial = 0;
  std::vector<EnergyEntry> entries;

  int final_value() const { return entries.empty() ? initial : entries.back().after; }
  bool operator==(const EnergyLedger &) const = default;
};

struct ExecutionTrace
{
  std::vector<Pose> states;     // start pose, then the pose after every unit step or rotation
  std::vector<Cell> visited;    // start cell, then every cell recorded as entered
  std::vector<Event> events;
  std::vector<Fault> faults;
  std::optional<EnergyLedger> energy;
  std::size_t unit_steps = 0;   // cells actually entered (committed)
  bool halted = false;

  Pose final_pose() const { return states.back(); }
  std::optional<int> final_energy() const
  {
    return energy ? std::optional<int>(energy->final_value()) : std::nullopt;
  }

  bool operator==(const ExecutionTrace &) const = default;
};

/// Run `actions` from t.start under t's world rules. Never throws for
/// world-level failures; they are recorded as faults.
ExecutionTrace execute(const ActionSequence & actions, const TaskSpec & t);

// ---------------------------------------------------------------------------
// Knight moves

struct KnightExpansion
{
  std::vector<Cell> cells;  // three cells in traversal order; the last is the landing
  Delta delta;
  Pose end;
};

struct IllegalKnight
{
  Delta delta;
  std::string reason;
};

struct KnightOutOfBounds
{
  Cell first_bad_cell;
  std::size_t step_index = 0;
};

/**
 * Resolve DIR_X/DIR_Y against the current facing, merge them into one
 * global displacement and check it is an L-shape ((1,2) or (2,1) in
 * absolute value). A legal move is expanded into its two legs in the
 * requested order. The facing never changes.
 */
std::variant<KnightExpansion, IllegalKnight, KnightOutOfBounds> expand_knight(
  const Pose & p, const KnightStep & k, const GridConstants & grid = {});

/// Global displacement of a knight step from facing `o`.
Delta knight_delta(Orientation o, const KnightStep & k);

// ---------------------------------------------------------------------------
// Canonical JSON

nlohmann::ordered_json trace_to_json(const ExecutionTrace & trace);
nlohmann::ordered_json actions_to_json(const ActionSequence & actions);
std::string dump_canonical(const nlohmann::ordered_json & j);

}  // namespace gridblock
