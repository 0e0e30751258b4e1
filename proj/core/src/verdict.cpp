#include "gridblock/verdict.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gridblock
{

std::string_view to_string(IssueKind kind)
{
  switch (kind) {
    case IssueKind::OutOfBounds: return "OutOfBounds";
    case IssueKind::ObstacleCollision: return "ObstacleCollision";
    case IssueKind::IllegalKnightMove: return "IllegalKnightMove";
    case IssueKind::RevisitViolation: return "RevisitViolation";
    case IssueKind::EnergyDepleted: return "EnergyDepleted";
    case IssueKind::ForbiddenCell: return "ForbiddenCell";
    case IssueKind::PickWithoutItem: return "PickWithoutItem";
    case IssueKind::PlaceWithoutCarry: return "PlaceWithoutCarry";
    case IssueKind::WrongBankAction: return "WrongBankAction";
    case IssueKind::MineralSkippedNoEnergy: return "MineralSkippedNoEnergy";
  }
  return "?";
}

namespace
{

IssueKind issue_of(FaultKind k)
{
  switch (k) {
    case FaultKind::OutOfBounds: return IssueKind::OutOfBounds;
    case FaultKind::ObstacleCollision: return IssueKind::ObstacleCollision;
    case FaultKind::IllegalKnightMove: return IssueKind::IllegalKnightMove;
    case FaultKind::RevisitViolation: return IssueKind::RevisitViolation;
    case FaultKind::EnergyDepleted: return IssueKind::EnergyDepleted;
    case FaultKind::ForbiddenCell: return IssueKind::ForbiddenCell;
    case FaultKind::PickWithoutItem: return IssueKind::PickWithoutItem;
    case FaultKind::PlaceWithoutCarry: return IssueKind::PlaceWithoutCarry;
    case FaultKind::WrongBankAction: return IssueKind::WrongBankAction;
  }
  return IssueKind::OutOfBounds;
}

std::string template_id(IssueKind k)
{
  switch (k) {
    case IssueKind::OutOfBounds: return "fault.out_of_bounds";
    case IssueKind::ObstacleCollision: return "fault.obstacle_collision";
    case IssueKind::IllegalKnightMove: return "fault.illegal_knight_move";
    case IssueKind::RevisitViolation: return "fault.revisit";
    case IssueKind::EnergyDepleted: return "fault.energy_depleted";
    case IssueKind::ForbiddenCell: return "fault.forbidden_cell";
    case IssueKind::PickWithoutItem: return "fault.pick_without_item";
    case IssueKind::PlaceWithoutCarry: return "fault.place_without_carry";
    case IssueKind::WrongBankAction: return "fault.wrong_bank_action";
    case IssueKind::MineralSkippedNoEnergy: return "issue.mineral_skipped";
  }
  return "fault.unknown";
}

std::string block_ref(std::size_t primitive) { return "action #" + std::to_string(primitive + 1); }

std::string fault_text(const FaultReport & f)
{
  const auto cell = format_cell(f.cell);
  switch (f.kind) {
    case IssueKind::OutOfBounds:
      return "During " + block_ref(f.primitive_index) + " the robot would leave the grid at " + cell +
             ". Every step must stay on the board; check the distance of that move.";
    case IssueKind::ObstacleCollision:
      return "During " + block_ref(f.primitive_index) + " the robot runs into the obstacle at " + cell +
             ". Plan a route around the blocked cells.";
    case IssueKind::IllegalKnightMove:
      return "Knight " + block_ref(f.primitive_index) + " at " + cell +
             " is not an L-shaped move (" + f.detail + "). Use two cells on one axis and one on the other.";
    case IssueKind::RevisitViolation:
      return "During " + block_ref(f.primitive_index) + " the robot enters " + cell +
             " a second time. Each cell may be covered only once.";
    case IssueKind::EnergyDepleted:
      return "The robot runs out of energy trying to enter " + cell + " during " + block_ref(f.primitive_index) +
             ". Collect minerals earlier or avoid swamps.";
    case IssueKind::ForbiddenCell:
      return "During " + block_ref(f.primitive_index) + " the robot tries to enter " + cell +
             ", which it is not allowed to enter.";
    case IssueKind::PickWithoutItem:
      return "At " + cell + ", " + block_ref(f.primitive_index) + " tries to pick up something that is not there (" +
             f.detail + ").";
    case IssueKind::PlaceWithoutCarry:
      return "At " + cell + ", " + block_ref(f.primitive_index) + " tries to place an item, but the robot is not carrying one.";
    case IssueKind::WrongBankAction:
      return "At " + cell + " during " + block_ref(f.primitive_index) + ": " + f.detail + ".";
    case IssueKind::MineralSkippedNoEnergy:
      return "The robot reaches the mineral at " + cell + " with no energy left, so it cannot collect it. "
             "Try a route that collects minerals earlier or avoids swamps.";
  }
  return "The program did not run as expected at " + cell + ".";
}

std::string join_cells(const std::vector<Cell> & cells)
{
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ", ";
    out += format_cell(cells[i]);
  }
  return out;
}

struct Failure
{
  std::string id;
  std::string text;
};

// Tile-cleaning program shape: one procedure sweeping two rows, called from
// a counted loop.
std::optional<Failure> structural_failure(const BlockProgram & program, const StructuralChecks & checks, const TaskSpec & t)
{
  const int row = t.grid.size - 1;
  auto cells_of = [&](const Statement & s, RelDir dir) -> std::optional<int> {
    const auto * m = std::get_if<Move>(&s.node);
    if (!m || m->dir != dir) return std::nullopt;
    try {
      return displacement_cells(m->speed, m->duration, t.grid.cell_size_mm);
    } catch (const KinematicsError &) {
      return std::nullopt;
    }
  };
  auto sweeps_two_rows = [&](const StatementList & body) {
    if (body.size() != 4) return false;
    return cells_of(body[0], RelDir::Forward) == row && cells_of(body[1], RelDir::Left) == 1 &&
           cells_of(body[2], RelDir::Backward) == row && cells_of(body[3], RelDir::Left) == 1;
  };

  if (program.procedures.empty()) {
    return Failure{
      "structure.procedure_missing",
      "Package the work of cleaning two rows into a procedure (for example clean_2_rows) and call it from a loop."};
  }

  std::optional<std::string> good_proc;
  for (const auto & [name, body] : program.procedures) {
    if (static_cast<int>(body.size()) == checks.procedure_body_steps && sweeps_two_rows(body)) {
      good_proc = name;
      break;
    }
  }
  if (!good_proc) {
    const auto & [name, body] = *program.procedures.begin();
    if (static_cast<int>(body.size()) != checks.procedure_body_steps) {
      return Failure{
        "structure.procedure_steps",
        "Procedure '" + name + "' has " + std::to_string(body.size()) + " steps; it should have " +
          std::to_string(checks.procedure_body_steps) +
          ": forward along a row, shift left, backward along the next row, shift left again."};
    }
    return Failure{
      "structure.procedure_pattern",
      "Procedure '" + name + "' should move forward " + std::to_string(row) + " tiles, left 1, backward " +
        std::to_string(row) + " tiles, then left 1. Check the SPEED and DURATION of each step."};
  }

  std::optional<std::int64_t> loop_times;
  for (const auto & s : program.main) {
    const auto * loop = std::get_if<RepeatLoop>(&s.node);
    if (!loop) continue;
    if (called_procedures(loop->body).count(*good_proc)) {
      loop_times = loop->times;
      if (loop->times == checks.loop_times) return std::nullopt;
    }
  }
  if (loop_times) {
    return Failure{
      "structure.loop_times",
      "The loop calls '" + *good_proc + "' " + std::to_string(*loop_times) + " times; it should repeat " +
        std::to_string(checks.loop_times) + " times."};
  }
  return Failure{
    "structure.loop_missing",
    "Call '" + *good_proc + "' from a repeat loop that runs " + std::to_string(checks.loop_times) + " times."};
}

std::optional<Failure> cover_failure(const ExecutionTrace & trace, const CoverAllCells & rule, const TaskSpec & t)
{
  const std::set<Cell> seen(trace.visited.begin(), trace.visited.end());
  std::vector<Cell> missing;
  for (int y = 0; y < t.grid.size; ++y) {
    for (int x = 0; x < t.grid.size; ++x) {
      const Cell c{x, y};
      if (!rule.exceptions.count(c) && !seen.count(c)) missing.push_back(c);
    }
  }
  if (missing.empty()) return std::nullopt;
  const auto required = static_cast<std::size_t>(t.grid.size * t.grid.size) - rule.exceptions.size();
  return Failure{
    "coverage.incomplete",
    "The robot covered " + std::to_string(required - missing.size()) + " of " + std::to_string(required) +
      " cells. Not yet covered: " + join_cells(missing) + "."};
}

std::optional<Failure> path_failure(const ExecutionTrace & trace, const FollowExactCellPath & rule)
{
  if (trace.visited == rule.path) return std::nullopt;
  const auto n = std::min(trace.visited.size(), rule.path.size());
  std::size_t i = 0;
  while (i < n && trace.visited[i] == rule.path[i]) ++i;
  std::string text;
  if (i < n) {
    text = "The route leaves the expected path at step " + std::to_string(i) + ": the robot goes to " +
           format_cell(trace.visited[i]) + " but should go to " + format_cell(rule.path[i]) + ".";
  } else if (trace.visited.size() < rule.path.size()) {
    text = "The route stops at " + format_cell(trace.visited.back()) + " before finishing; next it should go to " +
           format_cell(rule.path[i]) + ".";
  } else {
    text = "The route is correct up to " + format_cell(rule.path.back()) + " but then keeps going to " +
           format_cell(trace.visited[i]) + ".";
  }
  return Failure{"path.mismatch", text + " Look for the shortest route that activates the triggers in order."};
}

std::optional<Failure> mineral_failure(const ExecutionTrace & trace, const CollectAllMinerals & rule, const TaskSpec & t)
{
  std::set<Cell> collected;
  for (const auto & e : trace.events) {
    if (const auto * m = std::get_if<MineralCollected>(&e.what)) collected.insert(m->cell);
  }
  std::vector<Cell> missing;
  for (auto c : t.minerals) {
    if (!collected.count(c)) missing.push_back(c);
  }
  if (!missing.empty()) {
    return Failure{"minerals.uncollected", "These minerals were not collected: " + join_cells(missing) + "."};
  }
  if (auto e = trace.final_energy(); e && *e <= rule.min_final_energy_exclusive) {
    return Failure{
      "energy.final", "All minerals were collected but the robot ends with " + std::to_string(*e) +
                        " energy; it must finish with more than " + std::to_string(rule.min_final_energy_exclusive) + "."};
  }
  return std::nullopt;
}

std::optional<Failure> transport_failure(const ExecutionTrace & trace, const TransportAllItems & rule, const TaskSpec & t)
{
  std::map<std::string, std::string> where;
  for (const auto & item : t.items) where[item] = "left";
  for (const auto & e : trace.events) {
    if (const auto * p = std::get_if<ItemPicked>(&e.what)) where[p->item] = "carried";
    if (const auto * p = std::get_if<ItemPlaced>(&e.what)) where[p->item] = p->to == Bank::Right ? "right" : "left";
  }
  std::vector<std::string> stranded;
  for (const auto & item : t.items) {
    if (where[item] != "right") stranded.push_back(item + " (" + where[item] + ")");
  }
  if (stranded.empty()) return std::nullopt;
  std::string list;
  for (std::size_t i = 0; i < stranded.size(); ++i) list += (i ? ", " : "") + stranded[i];
  return Failure{
    "items.not_transported", "Not every item reached " + format_cell(rule.to) + " on the far bank: " + list + "."};
}

std::optional<Failure> knight_failure(const ExecutionTrace & trace, const KnightFullCover & rule, const TaskSpec & t)
{
  std::map<Cell, int> counts;
  for (auto c : trace.visited) ++counts[c];
  std::vector<Cell> missing, repeated, extra;
  for (int y = 0; y < t.grid.size; ++y) {
    for (int x = 0; x < t.grid.size; ++x) {
      const Cell c{x, y};
      const int n = counts.count(c) ? counts[c] : 0;
      if (rule.exceptions.count(c)) {
        if (n > 0) extra.push_back(c);
      } else if (n == 0) {
        missing.push_back(c);
      } else if (n > 1) {
        repeated.push_back(c);
      }
    }
  }
  const auto required = static_cast<std::size_t>(t.grid.size * t.grid.size) - rule.exceptions.size();
  if (!missing.empty()) {
    return Failure{
      "knight.coverage", "The tour covers " + std::to_string(required - missing.size()) + " of " +
                           std::to_string(required) + " cells. Not yet covered: " + join_cells(missing) + "."};
  }
  if (!repeated.empty()) {
    return Failure{"knight.repeated", "These cells are covered more than once: " + join_cells(repeated) + "."};
  }
  if (!extra.empty()) {
    return Failure{"knight.excluded", "The tour passes over cells it should avoid: " + join_cells(extra) + "."};
  }
  if (trace.visited.back() != rule.goal) {
    return Failure{
      "knight.goal",
      "The tour ends at " + format_cell(trace.visited.back()) + " instead of the goal " + format_cell(rule.goal) + "."};
  }
  return std::nullopt;
}

std::string success_text(const TaskSpec & t, const ExecutionTrace & trace)
{
  std::ostringstream out;
  out << "Well done! ";
  std::visit(
    [&](const auto & rule) {
      using R = std::decay_t<decltype(rule)>;
      if constexpr (std::is_same_v<R, CoverAllCells>) {
        out << "The robot covers every cell and finishes at " << format_cell(trace.final_pose().cell) << ".";
      } else if constexpr (std::is_same_v<R, FollowExactCellPath>) {
        out << "The robot follows the shortest route and activates every trigger.";
      } else if constexpr (std::is_same_v<R, CollectAllMinerals>) {
        out << "All minerals are collected with " << trace.final_energy().value_or(0) << " energy to spare.";
      } else if constexpr (std::is_same_v<R, TransportAllItems>) {
        out << "Every item crosses the river safely.";
      } else {
        out << "The knight covers every free cell exactly once and reaches " << format_cell(rule.goal) << ".";
      }
    },
    t.success);
  out << " You can return to the task list.";
  return out.str();
}

}  // namespace

std::optional<FaultReport> first_fault(const ExecutionTrace & trace, const TaskSpec & t)
{
  std::optional<FaultReport> best;
  auto consider = [&](FaultReport r) {
    if (!best || std::pair(r.primitive_index, r.step_index) < std::pair(best->primitive_index, best->step_index)) {
      best = std::move(r);
    }
  };
  for (const auto & f : trace.faults) {
    const auto kind = issue_of(f.kind);
    consider({f.primitive_index, f.step_index, f.cell, kind, template_id(kind), f.detail});
  }
  if (!t.minerals.empty()) {
    for (const auto & e : trace.events) {
      if (const auto * m = std::get_if<MineralSkippedNoEnergy>(&e.what)) {
        consider(
          {e.primitive_index, e.step_index, m->cell, IssueKind::MineralSkippedNoEnergy,
           template_id(IssueKind::MineralSkippedNoEnergy), "not enough energy to collect"});
      }
    }
  }
  return best;
}

Verdict check(const ExecutionTrace & trace, const BlockProgram & program, const TaskSpec & t)
{
  Verdict v;
  v.echo_xml = serialize_program(program);

  if (auto f = first_fault(trace, t)) {
    v.feedback_text = fault_text(*f);
    v.fault = std::move(f);
    return v;
  }

  std::optional<Failure> failure = std::visit(
    [&](const auto & rule) -> std::optional<Failure> {
      using R = std::decay_t<decltype(rule)>;
      if constexpr (std::is_same_v<R, CoverAllCells>) {
        if (auto f = cover_failure(trace, rule, t)) return f;
        if (rule.structural) return structural_failure(program, *rule.structural, t);
        return std::nullopt;
      } else if constexpr (std::is_same_v<R, FollowExactCellPath>) {
        return path_failure(trace, rule);
      } else if constexpr (std::is_same_v<R, CollectAllMinerals>) {
        return mineral_failure(trace, rule, t);
      } else if constexpr (std::is_same_v<R, TransportAllItems>) {
        return transport_failure(trace, rule, t);
      } else {
        return knight_failure(trace, rule, t);
      }
    },
    t.success);

  if (failure) {
    v.failed_check = failure->id;
    v.feedback_text = failure->text;
    return v;
  }
  v.is_correct = true;
  v.return_button = true;
  v.feedback_text = success_text(t, trace);
  return v;
}

nlohmann::ordered_json verdict_to_json(const Verdict & v)
{
  nlohmann::ordered_json j;
  j["text"] = v.feedback_text;
  j["xml"] = v.echo_xml ? nlohmann::ordered_json(*v.echo_xml) : nlohmann::ordered_json(nullptr);
  j["is_correct"] = v.is_correct;
  j["return_button"] = v.is_correct;
  return j;
}

std::string render_feedback(const Verdict & v) { return verdict_to_json(v).dump(2); }

Verdict rejection_verdict(std::string message)
{
  Verdict v;
  v.failed_check = "program.invalid";
  v.feedback_text = std::move(message);
  return v;
}

}  // namespace gridblock
