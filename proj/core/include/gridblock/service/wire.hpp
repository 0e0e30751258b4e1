// wire.hpp - robot command stream emitted for a lowered program
#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridblock/executor.hpp"

namespace gridblock::service
{

struct WireMove
{
  RelDir dir;
  int cells;
  bool operator==(const WireMove &) const = default;
};
struct WireTurn
{
  Side side;
  int degrees;
  bool operator==(const WireTurn &) const = default;
};
struct WireKnight
{
  KnightStep step;
  bool operator==(const WireKnight &) const = default;
};
struct WirePick
{
  std::string item;
  bool operator==(const WirePick &) const = default;
};
struct WirePlace
{
  bool operator==(const WirePlace &) const = default;
};
struct WireEnd
{
  bool operator==(const WireEnd &) const = default;
};

using WireCommand = std::variant<WireMove, WireTurn, WireKnight, WirePick, WirePlace, WireEnd>;

/// One command per primitive, in order, terminated by END.
std::vector<WireCommand> emit_wire(const ActionSequence & actions);

nlohmann::ordered_json wire_to_json(const std::vector<WireCommand> & commands);

/// Text form, e.g. "MOVE forward 4", "KNIGHT right forward 2 1 x-first", "END".
std::string format_line(const WireCommand & c);

/**
 * Robot-side interpreter for a command stream: tracks the pose and every
 * cell the robot drives through. It knows the grid but none of the task
 * rules, so it agrees with the executor only on fault-free runs.
 */
class WireInterpreter
{
public:
  explicit WireInterpreter(Pose start, GridConstants grid = {});

  /// Returns false once END was seen or a command could not be carried out.
  bool feed(const WireCommand & c);

  const Pose & pose() const { return pose_; }
  const std::vector<Cell> & cells() const { return cells_; }
  bool finished() const { return finished_; }

private:
  Pose pose_;
  GridConstants grid_;
  std::vector<Cell> cells_;
  bool finished_ = false;
  bool failed_ = false;
};

}  // namespace gridblock::service
