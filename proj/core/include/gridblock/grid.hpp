// grid.hpp - cell geometry and robot kinematics on the square task grid
#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridblock
{

enum class Orientation { North, East, South, West };

/// Direction of a translation relative to the robot's facing.
enum class RelDir { Forward, Backward, Left, Right };

enum class Side { Left, Right };

struct Cell
{
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell &) const = default;
};

struct Delta
{
  int dx = 0;
  int dy = 0;

  bool operator==(const Delta &) const = default;
  Delta operator-() const { return {-dx, -dy}; }
  Delta operator+(Delta o) const { return {dx + o.dx, dy + o.dy}; }
};

struct Pose
{
  Cell cell;
  Orientation facing = Orientation::North;

  bool operator==(const Pose &) const = default;
};

/// Board dimensions. Built-in tasks all use the 5x5 / 300 mm board; task
/// files may override it.
struct GridConstants
{
  int size = 5;
  double cell_size_mm = 300.0;

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < size && c.y < size; }
  bool operator==(const GridConstants &) const = default;
};

class KinematicsError : public std::domain_error
{
public:
  enum class Kind { NonPositiveInput, UnsupportedAngle };

  KinematicsError(Kind kind, const std::string & what) : std::domain_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/**
 * Number of cells covered by a move of `speed` mm/s held for `duration` s:
 * round(duration * speed / cell_size), rounding halves away from zero.
 * Throws KinematicsError(NonPositiveInput) unless both operands are finite
 * and strictly positive.
 */
int displacement_cells(double speed, double duration, double cell_size_mm = 300.0);

/// Global displacement for a translation of `n` cells in direction `rel`
/// while facing `o`. Translations never alter the facing.
Delta relative_to_global(Orientation o, RelDir rel, int n);

struct OutOfBounds
{
  Cell first_bad_cell;
};

/**
 * Translate `p` by `d`, walking one cell at a time (x axis first, then y).
 * Either the whole move lands on the grid or the first offending cell is
 * reported and nothing is committed.
 */
std::variant<Pose, OutOfBounds> apply_delta(const Pose & p, Delta d, const GridConstants & grid = {});

/// Throws KinematicsError(UnsupportedAngle) for anything but 90 or 180.
Orientation rotate(Orientation o, Side side, int degrees);

/// Cells entered when walking `d` from `from` (x leg first), excluding `from`.
std::vector<Cell> unit_path(Cell from, Delta d);

Delta unit_vector(Orientation o);

std::string_view to_string(Orientation o);
std::string_view to_string(RelDir d);
std::string_view to_string(Side s);
std::optional<Orientation> parse_orientation(std::string_view text);
std::optional<RelDir> parse_rel_dir(std::string_view text);
std::optional<Side> parse_side(std::string_view text);

std::string format_cell(Cell c);

}  // namespace gridblock
