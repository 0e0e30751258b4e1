// verdict.hpp - success decisions, fault localization and feedback rendering
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gridblock/executor.hpp"
#include "gridblock/program.hpp"
#include "gridblock/task.hpp"

namespace gridblock
{

/// What went wrong first: either a recorded fault or, in energy tasks, a
/// mineral the robot could not afford to collect.
enum class IssueKind {
  OutOfBounds,
  ObstacleCollision,
  IllegalKnightMove,
  RevisitViolation,
  EnergyDepleted,
  ForbiddenCell,
  PickWithoutItem,
  PlaceWithoutCarry,
  WrongBankAction,
  MineralSkippedNoEnergy,
};

std::string_view to_string(IssueKind kind);

struct FaultReport
{
  std::size_t primitive_index = 0;
  std::size_t step_index = 0;
  Cell cell;
  IssueKind kind;
  std::string template_id;  // feedback template, e.g. "fault.out_of_bounds"
  std::string detail;

  bool operator==(const FaultReport &) const = default;
};

struct Verdict
{
  bool is_correct = false;
  bool return_button = false;
  std::string feedback_text;
  std::optional<std::string> echo_xml;
  std::optional<FaultReport> fault;
  /// Id of the success condition that failed when no fault explains it,
  /// e.g. "structure.loop_times" or "coverage.incomplete".
  std::optional<std::string> failed_check;

  bool operator==(const Verdict &) const = default;
};

/// Earliest issue by (primitive, step); recorded faults win ties.
std::optional<FaultReport> first_fault(const ExecutionTrace & trace, const TaskSpec & t);

/// Decide success for `trace` (produced by execute against `t`) and fill in
/// feedback. `program` is only consulted for structural checks.
Verdict check(const ExecutionTrace & trace, const BlockProgram & program, const TaskSpec & t);

/// The four-key verdict object: text, xml, is_correct, return_button.
nlohmann::ordered_json verdict_to_json(const Verdict & v);

/// verdict_to_json pretty-printed with two-space indentation.
std::string render_feedback(const Verdict & v);

/// Verdict for submissions that never reach the simulator (parse or
/// validation failures).
Verdict rejection_verdict(std::string message);

}  // namespace gridblock
