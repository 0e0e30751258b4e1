#include "gridblock/service/wire.hpp"

namespace gridblock::service
{

std::vector<WireCommand> emit_wire(const ActionSequence & actions)
{
  std::vector<WireCommand> out;
  out.reserve(actions.size() + 1);
  for (const auto & a : actions) {
    std::visit(
      [&](const auto & act) {
        using A = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<A, Translate>) out.emplace_back(WireMove{act.dir, act.cells});
        else if constexpr (std::is_same_v<A, Rotate>) out.emplace_back(WireTurn{act.side, act.degrees});
        else if constexpr (std::is_same_v<A, KnightStep>) out.emplace_back(WireKnight{act});
        else if constexpr (std::is_same_v<A, PickAction>) out.emplace_back(WirePick{act.item});
        else out.emplace_back(WirePlace{});
      },
      a);
  }
  out.emplace_back(WireEnd{});
  return out;
}

nlohmann::ordered_json wire_to_json(const std::vector<WireCommand> & commands)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto & c : commands) {
    nlohmann::ordered_json j;
    std::visit(
      [&](const auto & cmd) {
        using C = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<C, WireMove>) {
          j = {{"cmd", "MOVE"}, {"dir", to_string(cmd.dir)}, {"cells", cmd.cells}};
        } else if constexpr (std::is_same_v<C, WireTurn>) {
          j = {{"cmd", "TURN"}, {"side", to_string(cmd.side)}, {"degrees", cmd.degrees}};
        } else if constexpr (std::is_same_v<C, WireKnight>) {
          j = {
            {"cmd", "KNIGHT"},
            {"dirX", to_string(cmd.step.dir_x)},
            {"dirY", cmd.step.dir_y == KnightDirY::Forward ? "forward" : "backward"},
            {"stepsX", cmd.step.steps_x},
            {"stepsY", cmd.step.steps_y},
            {"legOrder", cmd.step.leg_order == LegOrder::XFirst ? "x-first" : "y-first"},
          };
        } else if constexpr (std::is_same_v<C, WirePick>) {
          j = {{"cmd", "PICK"}, {"item", cmd.item}};
        } else if constexpr (std::is_same_v<C, WirePlace>) {
          j = {{"cmd", "PLACE"}};
        } else {
          j = {{"cmd", "END"}};
        }
      },
      c);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string format_line(const WireCommand & c)
{
  return std::visit(
    [](const auto & cmd) -> std::string {
      using C = std::decay_t<decltype(cmd)>;
      if constexpr (std::is_same_v<C, WireMove>) {
        return "MOVE " + std::string(to_string(cmd.dir)) + " " + std::to_string(cmd.cells);
      } else if constexpr (std::is_same_v<C, WireTurn>) {
        return "TURN " + std::string(to_string(cmd.side)) + " " + std::to_string(cmd.degrees);
      } else if constexpr (std::is_same_v<C, WireKnight>) {
        return "KNIGHT " + std::string(to_string(cmd.step.dir_x)) + " " +
               (cmd.step.dir_y == KnightDirY::Forward ? "forward " : "backward ") + std::to_string(cmd.step.steps_x) +
               " " + std::to_string(cmd.step.steps_y) + " " +
               (cmd.step.leg_order == LegOrder::XFirst ? "x-first" : "y-first");
      } else if constexpr (std::is_same_v<C, WirePick>) {
        return "PICK " + cmd.item;
      } else if constexpr (std::is_same_v<C, WirePlace>) {
        return "PLACE";
      } else {
        return "END";
      }
    },
    c);
}

WireInterpreter::WireInterpreter(Pose start, GridConstants grid) : pose_(start), grid_(grid)
{
  cells_.push_back(start.cell);
}

bool WireInterpreter::feed(const WireCommand & c)
{
  if (finished_ || failed_) return false;
  if (const auto * m = std::get_if<WireMove>(&c)) {
    const auto d = relative_to_global(pose_.facing, m->dir, m->cells);
    const auto result = apply_delta(pose_, d, grid_);
    if (std::holds_alternative<OutOfBounds>(result)) {
      failed_ = true;
      return false;
    }
    for (auto cell : unit_path(pose_.cell, d)) cells_.push_back(cell);
    pose_ = std::get<Pose>(result);
  } else if (const auto * t = std::get_if<WireTurn>(&c)) {
    pose_.facing = rotate(pose_.facing, t->side, t->degrees);
  } else if (const auto * k = std::get_if<WireKnight>(&c)) {
    const auto result = expand_knight(pose_, k->step, grid_);
    const auto * ok = std::get_if<KnightExpansion>(&result);
    if (!ok) {
      failed_ = true;
      return false;
    }
    cells_.insert(cells_.end(), ok->cells.begin(), ok->cells.end());
    pose_ = ok->end;
  } else if (std::holds_alternative<WireEnd>(c)) {
    finished_ = true;
  }
  return true;
}

}  // namespace gridblock::service
