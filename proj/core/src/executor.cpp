#include "gridblock/executor.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

namespace gridblock
{

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Lowering

namespace
{

class Lowerer
{
public:
  Lowerer(const BlockProgram & p, const GridConstants & grid) : program_(p), grid_(grid) {}

  void lower_list(const StatementList & list, ActionSequence & out)
  {
    for (const auto & s : list) lower_one(s, out);
  }

private:
  void push(ActionSequence & out, Action a)
  {
    if (out.size() >= kUnrollBudget) throw UnrollBudgetExceeded();
    out.push_back(std::move(a));
  }

  void lower_one(const Statement & s, ActionSequence & out)
  {
    if (const auto * m = std::get_if<Move>(&s.node)) {
      push(out, Translate{m->dir, displacement_cells(m->speed, m->duration, grid_.cell_size_mm)});
    } else if (const auto * t = std::get_if<Turn>(&s.node)) {
      push(out, Rotate{t->side, t->degrees});
    } else if (const auto * k = std::get_if<KnightMove>(&s.node)) {
      push(out, KnightStep{k->dir_x, k->dir_y, k->steps_x, k->steps_y, k->leg_order});
    } else if (const auto * pick = std::get_if<Pick>(&s.node)) {
      push(out, PickAction{pick->item});
    } else if (std::holds_alternative<Place>(s.node)) {
      push(out, PlaceAction{});
    } else if (const auto * loop = std::get_if<RepeatLoop>(&s.node)) {
      if (loop->times <= 0) return;
      ActionSequence body;
      lower_list(loop->body, body);
      if (body.empty()) return;
      const auto room = kUnrollBudget - out.size();
      if (static_cast<std::uint64_t>(loop->times) > room / body.size()) throw UnrollBudgetExceeded();
      for (std::int64_t i = 0; i < loop->times; ++i) out.insert(out.end(), body.begin(), body.end());
    } else if (const auto * call = std::get_if<ProcCall>(&s.node)) {
      auto it = program_.procedures.find(call->name);
      if (it == program_.procedures.end()) {
        throw std::invalid_argument("call to undefined procedure '" + call->name + "'");
      }
      if (++depth_ > 64) throw std::invalid_argument("procedure calls nest too deeply (recursion?)");
      lower_list(it->second, out);
      --depth_;
    }
  }

  const BlockProgram & program_;
  const GridConstants & grid_;
  int depth_ = 0;
};

}  // namespace

ActionSequence lower(const BlockProgram & p, const GridConstants & grid)
{
  ActionSequence out;
  Lowerer(p, grid).lower_list(p.main, out);
  return out;
}

// ---------------------------------------------------------------------------
// Knight geometry

namespace
{

struct KnightPlan
{
  Delta delta;
  bool legal = false;
  std::vector<Cell> cells;
  std::size_t corner = 0;  // index of the cell that ends the first leg
};

KnightPlan plan_knight(const Pose & p, const KnightStep & k)
{
  KnightPlan plan;
  const Delta lateral = relative_to_global(p.facing, k.dir_x == Side::Left ? RelDir::Left : RelDir::Right, k.steps_x);
  const Delta along =
    relative_to_global(p.facing, k.dir_y == KnightDirY::Forward ? RelDir::Forward : RelDir::Backward, k.steps_y);
  plan.delta = lateral + along;

  const int ax = std::abs(plan.delta.dx);
  const int ay = std::abs(plan.delta.dy);
  plan.legal = (ax == 1 && ay == 2) || (ax == 2 && ay == 1);
  if (!plan.legal) return plan;

  const Delta first = k.leg_order == LegOrder::XFirst ? lateral : along;
  const Delta second = k.leg_order == LegOrder::XFirst ? along : lateral;
  plan.cells = unit_path(p.cell, first);
  plan.corner = plan.cells.size() - 1;
  const Cell corner_cell = plan.cells.back();
  for (auto c : unit_path(corner_cell, second)) plan.cells.push_back(c);
  return plan;
}

std::string delta_text(Delta d) { return "(" + std::to_string(d.dx) + "," + std::to_string(d.dy) + ")"; }

}  // namespace

Delta knight_delta(Orientation o, const KnightStep & k) { return plan_knight(Pose{{0, 0}, o}, k).delta; }

std::variant<KnightExpansion, IllegalKnight, KnightOutOfBounds> expand_knight(
  const Pose & p, const KnightStep & k, const GridConstants & grid)
{
  auto plan = plan_knight(p, k);
  if (!plan.legal) {
    return IllegalKnight{
      plan.delta, "merged displacement " + delta_text(plan.delta) + " is not an L-shape of (1,2) or (2,1)"};
  }
  for (std::size_t i = 0; i < plan.cells.size(); ++i) {
    if (!grid.contains(plan.cells[i])) return KnightOutOfBounds{plan.cells[i], i};
  }
  return KnightExpansion{plan.cells, plan.delta, Pose{plan.cells.back(), p.facing}};
}

// ---------------------------------------------------------------------------
// Simulation

std::string_view to_string(FaultKind kind)
{
  switch (kind) {
    case FaultKind::OutOfBounds: return "OutOfBounds";
    case FaultKind::ObstacleCollision: return "ObstacleCollision";
    case FaultKind::IllegalKnightMove: return "IllegalKnightMove";
    case FaultKind::RevisitViolation: return "RevisitViolation";
    case FaultKind::EnergyDepleted: return "EnergyDepleted";
    case FaultKind::ForbiddenCell: return "ForbiddenCell";
    case FaultKind::PickWithoutItem: return "PickWithoutItem";
    case FaultKind::PlaceWithoutCarry: return "PlaceWithoutCarry";
    case FaultKind::WrongBankAction: return "WrongBankAction";
  }
  return "?";
}

bool is_halting(FaultKind kind, const TaskPolicies & policies)
{
  switch (kind) {
    case FaultKind::OutOfBounds: return policies.halt_on_oob;
    case FaultKind::ObstacleCollision:
    case FaultKind::EnergyDepleted:
    case FaultKind::ForbiddenCell: return true;
    default: return false;
  }
}

Cell event_cell(const Event & e)
{
  return std::visit([](const auto & ev) { return ev.cell; }, e.what);
}

std::string_view event_name(const Event & e)
{
  static constexpr std::string_view names[] = {
    "MineralCollected", "MineralSkippedNoEnergy", "SwampEntered", "TriggerActivated", "ItemPicked", "ItemPlaced",
  };
  return names[e.what.index()];
}

namespace
{

enum class StepOutcome { Entered, AbortPrimitive, Halt };

enum class ItemPlace { LeftBank, RightBank, Carried };

class Simulator
{
public:
  explicit Simulator(const TaskSpec & t) : task_(t), pose_(t.start)
  {
    trace_.states.push_back(pose_);
    trace_.visited.push_back(pose_.cell);
    seen_.insert(pose_.cell);
    if (t.initial_energy) {
      energy_ = *t.initial_energy;
      trace_.energy = EnergyLedger{*t.initial_energy, {}};
    }
    for (const auto & item : t.items) items_[item] = ItemPlace::LeftBank;
  }

  ExecutionTrace run(const ActionSequence & actions)
  {
    for (std::size_t i = 0; i < actions.size() && !trace_.halted; ++i) {
      std::visit([&](const auto & a) { step(i, a); }, actions[i]);
    }
    return std::move(trace_);
  }

private:
  void fault(FaultKind kind, std::size_t prim, std::size_t step, Cell cell, std::string detail)
  {
    trace_.faults.push_back({kind, prim, step, cell, std::move(detail)});
    if (is_halting(kind, task_.policies)) trace_.halted = true;
  }

  void ledger(EnergyEntry::Reason reason, Cell c, int delta, std::size_t prim, std::size_t step)
  {
    energy_ += delta;
    trace_.energy->entries.push_back({reason, c, delta, energy_, prim, step});
  }

  StepOutcome enter(Cell c, std::size_t prim, std::size_t step, bool counted, bool obstacle_blocks)
  {
    if (!task_.grid.contains(c)) {
      fault(FaultKind::OutOfBounds, prim, step, c, "cell " + format_cell(c) + " is outside the grid");
      return trace_.halted ? StepOutcome::Halt : StepOutcome::AbortPrimitive;
    }
    if (obstacle_blocks && task_.obstacles.count(c)) {
      fault(FaultKind::ObstacleCollision, prim, step, c, "cell " + format_cell(c) + " is blocked by an obstacle");
      return StepOutcome::Halt;
    }
    if (task_.forbidden.count(c)) {
      fault(FaultKind::ForbiddenCell, prim, step, c, "the robot may not enter " + format_cell(c));
      return StepOutcome::Halt;
    }
    const bool swamp = task_.swamps.count(c) > 0;
    if (trace_.energy) {
      const int cost = 1 + (swamp ? 2 : 0);
      if (energy_ < cost) {
        fault(
          FaultKind::EnergyDepleted, prim, step, c,
          "entering " + format_cell(c) + " costs " + std::to_string(cost) + " energy but only " +
            std::to_string(energy_) + " remains");
        return StepOutcome::Halt;
      }
    }

    pose_.cell = c;
    trace_.states.push_back(pose_);
    ++trace_.unit_steps;
    if (counted) {
      if (task_.policies.revisit_check && seen_.count(c)) {
        fault(FaultKind::RevisitViolation, prim, step, c, "cell " + format_cell(c) + " was already visited");
      }
      trace_.visited.push_back(c);
      seen_.insert(c);
    }

    // World events, in order: move cost, swamp penalty, mineral, triggers.
    if (trace_.energy) ledger(EnergyEntry::Reason::Move, c, -1, prim, step);
    if (swamp) {
      if (trace_.energy) ledger(EnergyEntry::Reason::Swamp, c, -2, prim, step);
      push_event({SwampEntered{c}}, prim, step);
    }
    if (task_.minerals.count(c) && !collected_.count(c)) {
      if (!trace_.energy) {
        collected_.insert(c);
        push_event({MineralCollected{c}}, prim, step);
      } else if (energy_ >= 1) {
        ledger(EnergyEntry::Reason::Collect, c, -1, prim, step);
        ledger(EnergyEntry::Reason::Restore, c, +3, prim, step);
        collected_.insert(c);
        push_event({MineralCollected{c}}, prim, step);
      } else {
        push_event({MineralSkippedNoEnergy{c}}, prim, step);
      }
    }
    for (const auto & tr : task_.triggers) {
      if (tr.cell == c && activated_.insert(tr.label).second) {
        push_event({TriggerActivated{tr.label, c}}, prim, step);
      }
    }
    check_bank_safety(c, prim, step);
    return StepOutcome::Entered;
  }

  void push_event(decltype(Event::what) what, std::size_t prim, std::size_t step)
  {
    trace_.events.push_back(Event{std::move(what), prim, step});
  }

  bool river_task() const { return !task_.items.empty() && task_.river.size() >= 2 && task_.right_bank; }

  Orientation near_bank_facing() const
  {
    const Cell a = task_.river[0], b = task_.river[1];
    const Delta away{a.x - b.x, a.y - b.y};
    for (auto o : {Orientation::North, Orientation::East, Orientation::South, Orientation::West}) {
      if (unit_vector(o) == away) return o;
    }
    return Orientation::West;
  }

  std::vector<std::string> on_bank(ItemPlace where) const
  {
    std::vector<std::string> out;
    for (const auto & item : task_.items) {
      if (items_.at(item) == where) out.push_back(item);
    }
    return out;
  }

  static std::optional<std::string> unsafe_pair(const std::vector<std::string> & bank)
  {
    auto has = [&](std::string_view name) { return std::find(bank.begin(), bank.end(), name) != bank.end(); };
    if (has("wolf") && has("goat")) return "the wolf would eat the goat";
    if (has("goat") && has("cabbage")) return "the goat would eat the cabbage";
    return std::nullopt;
  }

  // The bank the robot has just left is unattended.
  void check_bank_safety(Cell c, std::size_t prim, std::size_t step)
  {
    if (!river_task() || !task_.policies.safety_rules_on) return;
    std::optional<std::string> problem;
    std::string bank;
    if (c == task_.river.back()) {
      problem = unsafe_pair(on_bank(ItemPlace::LeftBank));
      bank = "left";
    } else if (c == task_.river.front()) {
      problem = unsafe_pair(on_bank(ItemPlace::RightBank));
      bank = "right";
    }
    if (problem) {
      fault(FaultKind::WrongBankAction, prim, step, c, "left the " + bank + " bank unattended: " + *problem);
    }
  }

  // Which bank the robot can reach from its pose, if any.
  std::optional<ItemPlace> reachable_bank() const
  {
    if (!river_task()) return std::nullopt;
    if (pose_.cell == task_.river.front() && pose_.facing == near_bank_facing()) return ItemPlace::LeftBank;
    if (pose_.cell == task_.river.back()) return ItemPlace::RightBank;
    return std::nullopt;
  }

  void step(std::size_t i, const Translate & t)
  {
    const auto path = unit_path(pose_.cell, relative_to_global(pose_.facing, t.dir, t.cells));
    for (std::size_t s = 0; s < path.size(); ++s) {
      if (enter(path[s], i, s, true, true) != StepOutcome::Entered) return;
    }
  }

  void step(std::size_t, const Rotate & r)
  {
    pose_.facing = rotate(pose_.facing, r.side, r.degrees);
    trace_.states.push_back(pose_);
  }

  void step(std::size_t i, const KnightStep & k)
  {
    const auto plan = plan_knight(pose_, k);
    if (!plan.legal) {
      fault(
        FaultKind::IllegalKnightMove, i, 0, pose_.cell,
        "merged displacement " + delta_text(plan.delta) + " is not an L-shape of (1,2) or (2,1)");
      return;
    }
    const auto landing = plan.cells.size() - 1;
    for (std::size_t s = 0; s < plan.cells.size(); ++s) {
      const bool is_landing = s == landing;
      const bool counted = task_.policies.knight_intermediates_count || is_landing || s == plan.corner;
      const bool blocks = is_landing || task_.policies.knight_intermediates_block;
      if (enter(plan.cells[s], i, s, counted, blocks) != StepOutcome::Entered) return;
    }
  }

  void step(std::size_t i, const PickAction & p)
  {
    const Cell c = pose_.cell;
    if (carried_) {
      fault(FaultKind::WrongBankAction, i, 0, c, "already carrying the " + *carried_ + "; only one item fits");
      return;
    }
    const auto bank = reachable_bank();
    if (!bank) {
      fault(FaultKind::WrongBankAction, i, 0, c, "no bank within reach of " + format_cell(c));
      return;
    }
    auto it = items_.find(p.item);
    if (it == items_.end() || it->second != *bank) {
      fault(FaultKind::PickWithoutItem, i, 0, c, "there is no " + p.item + " on this bank");
      return;
    }
    it->second = ItemPlace::Carried;
    carried_ = p.item;
    push_event({ItemPicked{p.item, c, *bank == ItemPlace::LeftBank ? Bank::Left : Bank::Right}}, i, 0);
  }

  void step(std::size_t i, const PlaceAction &)
  {
    const Cell c = pose_.cell;
    if (!carried_) {
      fault(FaultKind::PlaceWithoutCarry, i, 0, c, "nothing is being carried");
      return;
    }
    const auto bank = reachable_bank();
    if (!bank) {
      fault(FaultKind::WrongBankAction, i, 0, c, "items can only be placed from the ends of the river");
      return;
    }
    items_[*carried_] = *bank;
    push_event({ItemPlaced{*carried_, c, *bank == ItemPlace::LeftBank ? Bank::Left : Bank::Right}}, i, 0);
    carried_.reset();
  }

  const TaskSpec & task_;
  ExecutionTrace trace_;
  Pose pose_;
  int energy_ = 0;
  std::set<Cell> seen_;
  std::set<Cell> collected_;
  std::set<std::string> activated_;
  std::map<std::string, ItemPlace> items_;
  std::optional<std::string> carried_;
};

}  // namespace

ExecutionTrace execute(const ActionSequence & actions, const TaskSpec & t) { return Simulator(t).run(actions); }

// ---------------------------------------------------------------------------
// Canonical JSON

namespace
{

ordered_json cell_json(Cell c) { return ordered_json::array({c.x, c.y}); }

std::string_view reason_name(EnergyEntry::Reason r)
{
  switch (r) {
    case EnergyEntry::Reason::Move: return "move";
    case EnergyEntry::Reason::Swamp: return "swamp";
    case EnergyEntry::Reason::Collect: return "collect";
    case EnergyEntry::Reason::Restore: return "restore";
  }
  return "?";
}

std::string_view bank_name(Bank b) { return b == Bank::Left ? "left" : "right"; }

}  // namespace

ordered_json trace_to_json(const ExecutionTrace & trace)
{
  ordered_json j;
  auto states = ordered_json::array();
  for (const auto & p : trace.states) {
    states.push_back(ordered_json::array({p.cell.x, p.cell.y, std::string(to_string(p.facing))}));
  }
  j["states"] = std::move(states);

  auto visited = ordered_json::array();
  for (auto c : trace.visited) visited.push_back(cell_json(c));
  j["visited"] = std::move(visited);

  auto events = ordered_json::array();
  for (const auto & e : trace.events) {
    ordered_json ev;
    ev["type"] = event_name(e);
    ev["cell"] = cell_json(event_cell(e));
    if (const auto * t = std::get_if<TriggerActivated>(&e.what)) ev["label"] = t->label;
    if (const auto * p = std::get_if<ItemPicked>(&e.what)) {
      ev["item"] = p->item;
      ev["bank"] = bank_name(p->from);
    }
    if (const auto * p = std::get_if<ItemPlaced>(&e.what)) {
      ev["item"] = p->item;
      ev["bank"] = bank_name(p->to);
    }
    ev["primitive"] = e.primitive_index;
    ev["step"] = e.step_index;
    events.push_back(std::move(ev));
  }
  j["events"] = std::move(events);

  auto faults = ordered_json::array();
  for (const auto & f : trace.faults) {
    faults.push_back(ordered_json{
      {"kind", to_string(f.kind)},
      {"primitive", f.primitive_index},
      {"step", f.step_index},
      {"cell", cell_json(f.cell)},
      {"detail", f.detail},
    });
  }
  j["faults"] = std::move(faults);

  if (trace.energy) {
    auto entries = ordered_json::array();
    for (const auto & e : trace.energy->entries) {
      entries.push_back(ordered_json{
        {"reason", reason_name(e.reason)},
        {"cell", cell_json(e.cell)},
        {"delta", e.delta},
        {"after", e.after},
        {"primitive", e.primitive_index},
        {"step", e.step_index},
      });
    }
    j["energy"] = ordered_json{
      {"initial", trace.energy->initial}, {"final", trace.energy->final_value()}, {"ledger", std::move(entries)}};
  } else {
    j["energy"] = nullptr;
  }
  return j;
}

ordered_json actions_to_json(const ActionSequence & actions)
{
  auto arr = ordered_json::array();
  for (const auto & a : actions) {
    std::visit(
      [&](const auto & act) {
        using A = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<A, Translate>) {
          arr.push_back(ordered_json{{"op", "translate"}, {"dir", to_string(act.dir)}, {"cells", act.cells}});
        } else if constexpr (std::is_same_v<A, Rotate>) {
          arr.push_back(ordered_json{{"op", "rotate"}, {"side", to_string(act.side)}, {"degrees", act.degrees}});
        } else if constexpr (std::is_same_v<A, KnightStep>) {
          arr.push_back(ordered_json{
            {"op", "knight"},
            {"dirX", to_string(act.dir_x)},
            {"dirY", act.dir_y == KnightDirY::Forward ? "forward" : "backward"},
            {"stepsX", act.steps_x},
            {"stepsY", act.steps_y},
            {"legOrder", act.leg_order == LegOrder::XFirst ? "x-first" : "y-first"},
          });
        } else if constexpr (std::is_same_v<A, PickAction>) {
          arr.push_back(ordered_json{{"op", "pick"}, {"item", act.item}});
        } else {
          arr.push_back(ordered_json{{"op", "place"}});
        }
      },
      a);
  }
  return arr;
}

std::string dump_canonical(const ordered_json & j) { return j.dump(2); }

}  // namespace gridblock
