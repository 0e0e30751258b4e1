// program.hpp - typed AST for the Blockly-XML subset used by the studio
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridblock/grid.hpp"

namespace gridblock
{

enum class KnightDirY { Forward, Backward };

/// Which leg of a knight move runs first: the lateral (DIR_X) leg or the
/// longitudinal (DIR_Y) leg.
enum class LegOrder { XFirst, YFirst };

struct Statement;
using StatementList = std::vector<Statement>;

struct Move
{
  RelDir dir = RelDir::Forward;
  double speed = 0.0;     // mm/s
  double duration = 0.0;  // s

  bool operator==(const Move &) const = default;
};

struct Turn
{
  Side side = Side::Left;
  int degrees = 90;

  bool operator==(const Turn &) const = default;
};

struct KnightMove
{
  Side dir_x = Side::Right;
  KnightDirY dir_y = KnightDirY::Forward;
  int steps_x = 0;
  int steps_y = 0;
  LegOrder leg_order = LegOrder::XFirst;

  bool operator==(const KnightMove &) const = default;
};

struct Pick
{
  std::string item;

  bool operator==(const Pick &) const = default;
};

struct Place
{
  bool operator==(const Place &) const = default;
};

struct RepeatLoop
{
  std::int64_t times = 0;
  StatementList body;

  bool operator==(const RepeatLoop & other) const;
};

struct ProcCall
{
  std::string name;

  bool operator==(const ProcCall &) const = default;
};

struct Statement
{
  std::variant<Move, Turn, KnightMove, Pick, Place, RepeatLoop, ProcCall> node;

  bool operator==(const Statement &) const = default;
};

struct BlockProgram
{
  std::map<std::string, StatementList> procedures;
  StatementList main;

  bool operator==(const BlockProgram &) const = default;
};

// Block type names understood by the parser.
namespace blocks
{
inline constexpr std::string_view kMoveForward = "move_forward";
inline constexpr std::string_view kMoveBackward = "move_backward";
inline constexpr std::string_view kMoveLeft = "move_left";
inline constexpr std::string_view kMoveRight = "move_right";
inline constexpr std::string_view kTurnLeft = "turn_left";
inline constexpr std::string_view kTurnRight = "turn_right";
inline constexpr std::string_view kMoveKnight = "move_knight";
inline constexpr std::string_view kPickItem = "pick_item";
inline constexpr std::string_view kPlaceItem = "place_item";
inline constexpr std::string_view kRepeat = "controls_repeat";
inline constexpr std::string_view kProcDef = "procedures_defnoreturn";
inline constexpr std::string_view kProcCall = "procedures_callnoreturn";
}  // namespace blocks

/// Admissible block types for a task, each with its required field names.
struct BlockCatalog
{
  std::map<std::string, std::vector<std::string>> blocks;

  bool admits(std::string_view type) const { return blocks.find(std::string(type)) != blocks.end(); }
  std::vector<std::string> type_names() const;
  bool operator==(const BlockCatalog &) const = default;

  /// Every block type the parser knows.
  static BlockCatalog full();
  /// Subset of full() restricted to `types`; unknown names are ignored.
  static BlockCatalog of(const std::vector<std::string> & types);
};

class ParseError : public std::runtime_error
{
public:
  enum class Kind {
    XmlMalformed,
    InvalidStructure,
    UnknownBlockType,
    MissingField,
    DanglingCall,
    RecursiveProcedure,
  };

  ParseError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

std::string_view to_string(ParseError::Kind kind);

/**
 * Parse a Blockly-XML document into a BlockProgram.
 *
 * Statement order follows `<next>` chains; loop bodies come from
 * `<statement name="DO">`, procedure bodies from `<statement name="STACK">`.
 * At most one top-level chain may be a non-definition (the main chain).
 * Calls are resolved against the definitions and recursion is rejected.
 * Unknown blocks are rejected against `catalog`.
 */
BlockProgram parse_program(std::string_view xml_text, const BlockCatalog & catalog = BlockCatalog::full());

/// Emit a Blockly-XML document that parse_program reads back as `p`.
std::string serialize_program(const BlockProgram & p);

struct ValidationIssue
{
  std::string location;  // e.g. "main[2].body[0]" or "proc clean_2_rows[1]"
  std::string block_type;
  std::string message;

  bool operator==(const ValidationIssue &) const = default;
};

struct ValidationReport
{
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
};

/// Lists every statement outside `catalog` and every AST invariant violation.
ValidationReport validate_program(const BlockProgram & p, const BlockCatalog & catalog);

std::string_view block_type(const Statement & s);

/// Number of statements including nested loop bodies (procedure bodies excluded).
std::size_t count_statements(const StatementList & list);

/// Names of procedures called anywhere inside `list` (not transitively).
std::set<std::string> called_procedures(const StatementList & list);

}  // namespace gridblock
