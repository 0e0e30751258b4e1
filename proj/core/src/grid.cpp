#include "gridblock/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace gridblock
{

namespace
{

Orientation turn_quarter(Orientation o, Side side)
{
  const int idx = static_cast<int>(o);
  const int step = side == Side::Right ? 1 : 3;
  return static_cast<Orientation>((idx + step) % 4);
}

std::string lower(std::string_view s)
{
  std::string out(s);
  for (auto & ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

constexpr int kMaxCells = 1 << 30;

int displacement_cells(double speed, double duration, double cell_size_mm)
{
  if (!std::isfinite(speed) || !std::isfinite(duration) || speed <= 0.0 || duration <= 0.0) {
    throw KinematicsError(
      KinematicsError::Kind::NonPositiveInput, "speed and duration must be finite and positive");
  }
  if (!std::isfinite(cell_size_mm) || cell_size_mm <= 0.0) {
    throw KinematicsError(KinematicsError::Kind::NonPositiveInput, "cell size must be positive");
  }
  const double q = duration * speed / cell_size_mm;
  if (q >= kMaxCells) return kMaxCells;
  // Decimal fields such as 0.3 are not exact in binary, so a product that is
  // a half in decimal may come out a few ulps either side of it.
  const double whole = std::floor(q);
  const double frac = q - whole;
  if (std::abs(frac - 0.5) <= 1e-9 * std::max(1.0, q)) return static_cast<int>(whole) + 1;
  return static_cast<int>(std::round(q));
}

Delta unit_vector(Orientation o)
{
  switch (o) {
    case Orientation::North: return {0, 1};
    case Orientation::East: return {1, 0};
    case Orientation::South: return {0, -1};
    case Orientation::West: return {-1, 0};
  }
  return {};
}

Delta relative_to_global(Orientation o, RelDir rel, int n)
{
  Delta u{};
  switch (rel) {
    case RelDir::Forward: u = unit_vector(o); break;
    case RelDir::Backward: u = -unit_vector(o); break;
    case RelDir::Left: u = unit_vector(turn_quarter(o, Side::Left)); break;
    case RelDir::Right: u = unit_vector(turn_quarter(o, Side::Right)); break;
  }
  return {u.dx * n, u.dy * n};
}

std::vector<Cell> unit_path(Cell from, Delta d)
{
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(std::abs(d.dx) + std::abs(d.dy)));
  Cell at = from;
  const int sx = d.dx > 0 ? 1 : -1;
  const int sy = d.dy > 0 ? 1 : -1;
  for (int i = 0; i < std::abs(d.dx); ++i) {
    at.x += sx;
    cells.push_back(at);
  }
  for (int i = 0; i < std::abs(d.dy); ++i) {
    at.y += sy;
    cells.push_back(at);
  }
  return cells;
}

std::variant<Pose, OutOfBounds> apply_delta(const Pose & p, Delta d, const GridConstants & grid)
{
  for (const Cell & c : unit_path(p.cell, d)) {
    if (!grid.contains(c)) return OutOfBounds{c};
  }
  return Pose{{p.cell.x + d.dx, p.cell.y + d.dy}, p.facing};
}

Orientation rotate(Orientation o, Side side, int degrees)
{
  switch (degrees) {
    case 90: return turn_quarter(o, side);
    case 180: return turn_quarter(turn_quarter(o, Side::Right), Side::Right);
    default:
      throw KinematicsError(
        KinematicsError::Kind::UnsupportedAngle,
        "unsupported rotation of " + std::to_string(degrees) + " degrees");
  }
}

std::string_view to_string(Orientation o)
{
  switch (o) {
    case Orientation::North: return "North";
    case Orientation::East: return "East";
    case Orientation::South: return "South";
    case Orientation::West: return "West";
  }
  return "?";
}

std::string_view to_string(RelDir d)
{
  switch (d) {
    case RelDir::Forward: return "forward";
    case RelDir::Backward: return "backward";
    case RelDir::Left: return "left";
    case RelDir::Right: return "right";
  }
  return "?";
}

std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

std::optional<Orientation> parse_orientation(std::string_view text)
{
  const auto t = lower(text);
  if (t == "north" || t == "n" || t == "up") return Orientation::North;
  if (t == "east" || t == "e" || t == "right") return Orientation::East;
  if (t == "south" || t == "s" || t == "down") return Orientation::South;
  if (t == "west" || t == "w" || t == "left") return Orientation::West;
  return std::nullopt;
}

std::optional<RelDir> parse_rel_dir(std::string_view text)
{
  const auto t = lower(text);
  if (t == "forward") return RelDir::Forward;
  if (t == "backward") return RelDir::Backward;
  if (t == "left") return RelDir::Left;
  if (t == "right") return RelDir::Right;
  return std::nullopt;
}

std::optional<Side> parse_side(std::string_view text)
{
  const auto t = lower(text);
  if (t == "left") return Side::Left;
  if (t == "right") return Side::Right;
  return std::nullopt;
}

std::string format_cell(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

}  // namespace gridblock
