#include "gridblock/service/session.hpp"

#include <sstream>

namespace gridblock::service
{

void Session::remember(std::string role, std::string text)
{
  history.push_back({std::move(role), std::move(text)});
  while (history.size() > kHistoryCap) history.pop_front();
}

void Session::reset(std::string task)
{
  task_id = std::move(task);
  history.clear();
  last_workspace_xml.reset();
  last_trace.reset();
}

namespace
{

const char * const kRole =
  "You are a friendly tutor helping a child program a small robot with blocks. "
  "Reply with a single JSON object and nothing else, using exactly these keys: "
  "\"text\" (short feedback for the learner), \"xml\" (the learner's workspace, unchanged), "
  "\"is_correct\" (true or false) and \"return_button\" (equal to is_correct).";

const char * const kMotionRules =
  "The board is a 5 by 5 grid of 300 mm cells; x grows to the right and y grows upward. "
  "A move block with speed T (mm/s) and duration X (s) moves the robot round(T × X / 300) cells, "
  "rounding halves away from zero, relative to where the robot is facing. "
  "Turn blocks rotate in place by 90 or 180 degrees. "
  "A move that would leave the board stops the program.";

std::string cell_list(const auto & cells)
{
  std::string out;
  for (const auto & c : cells) {
    if (!out.empty()) out += ", ";
    out += format_cell(c);
  }
  return out.empty() ? "none" : out;
}

std::string start_line(const TaskSpec & t)
{
  return "The robot starts at " + format_cell(t.start.cell) + " facing " + std::string(to_string(t.start.facing)) + ".";
}

std::string one_line(std::string s)
{
  for (auto & ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

std::string generic_instructions(const TaskSpec & t)
{
  std::ostringstream os;
  os << "Task: " << (t.title.empty() ? t.id : t.title) << ".\n"
     << kMotionRules << "\n"
     << start_line(t) << "\n"
     << "Obstacles: " << cell_list(t.obstacles) << ".\n";
  os << "Decide whether the program reaches the goal of this task (" << success_kind(t.success)
     << ") without any fault, and explain the first problem you find in simple words.";
  return os.str();
}

namespace
{

std::string tile_cleaning(const TaskSpec & t)
{
  std::ostringstream os;
  os << "Task: clean every tile of the board.\n"
     << kMotionRules << "\n"
     << start_line(t) << "\n"
     << "The program is correct only if the robot passes over all 25 cells, and the program defines a "
        "procedure of four steps that the main program calls inside a loop repeated twice.";
  return os.str();
}

std::string secret_realm(const TaskSpec & t)
{
  std::ostringstream os;
  os << "Task: open the secret realm by stepping on the switches in the right order.\n"
     << kMotionRules << "\n"
     << start_line(t) << "\n"
     << "Walls: " << cell_list(t.obstacles) << ".\n"
     << "Switches:";
  for (const auto & tr : t.triggers) os << " " << tr.label << " at " << format_cell(tr.cell) << ";";
  os << "\nThe robot must follow the expected cells exactly and never touch a wall.";
  return os.str();
}

std::string mineral(const TaskSpec & t)
{
  std::ostringstream os;
  os << "Task: collect every mineral without running out of energy.\n"
     << kMotionRules << "\n"
     << start_line(t) << "\n"
     << "Energy starts at " << t.initial_energy.value_or(0) << ". Each cell entered costs 1, a swamp costs 2 more, "
     << "and picking up a mineral costs 1 but gives back 3. A mineral can only be picked up with at least 1 energy left.\n"
     << "Minerals: " << cell_list(t.minerals) << ".\n"
     << "Swamps: " << cell_list(t.swamps) << ".\n"
     << "The program is correct when all minerals are collected and energy stays above zero at the end.";
  return os.str();
}

std::string river(const TaskSpec & t)
{
  std::ostringstream os;
  os << "Task: carry the wolf, the goat and the cabbage across the river, one at a time.\n"
     << kMotionRules << "\n"
     << start_line(t) << "\n"
     << "River cells, near end first: " << cell_list(t.river) << ". The robot must not drive onto "
     << (t.right_bank ? format_cell(*t.right_bank) : std::string("the far bank")) << ".\n"
     << "Never leave the wolf alone with the goat, or the goat alone with the cabbage.\n"
     << "The program is correct when every item has been placed on the far bank.";
  return os.str();
}

std::string knights(const TaskSpec & t)
{
  std::ostringstream os;
  os << "Task: visit every free cell using only knight moves.\n"
     << kMotionRules << "\n"
     << start_line(t) << "\n"
     << "Obstacles: " << cell_list(t.obstacles) << ".\n"
     << "A knight move goes two cells one way and one cell the other way; the cells passed on the way count as "
        "visited. No cell may be visited twice, and the tour must end on ";
  if (const auto * k = std::get_if<KnightFullCover>(&t.success)) os << format_cell(k->goal);
  else os << "the goal";
  os << ".";
  return os.str();
}

}  // namespace

PromptBundle build_prompt(const TaskSpec & t, const Session & s)
{
  PromptBundle b;
  b.role_preamble = kRole;

  if (t.id == task_ids::kTileCleaning) b.task_instructions = tile_cleaning(t);
  else if (t.id == task_ids::kSecretRealm) b.task_instructions = secret_realm(t);
  else if (t.id == task_ids::kMineral) b.task_instructions = mineral(t);
  else if (t.id == task_ids::kRiverCrossing) b.task_instructions = river(t);
  else if (t.id == task_ids::kKnightsTour) b.task_instructions = knights(t);
  else b.task_instructions = generic_instructions(t);

  std::ostringstream os;
  os << "Task layout:\n" << task_to_json(t).dump() << "\n\n";
  os << "Recent messages (" << s.history.size() << "):\n";
  for (const auto & h : s.history) os << "- [" << h.role << "] " << one_line(h.text) << "\n";
  os << "\nCurrent workspace:\n";
  os << (s.last_workspace_xml ? *s.last_workspace_xml : std::string("(empty)")) << "\n";
  b.context_block = os.str();
  return b;
}

nlohmann::ordered_json prompt_to_json(const PromptBundle & b)
{
  return {
    {"rolePreamble", b.role_preamble},
    {"taskInstructions", b.task_instructions},
    {"contextBlock", b.context_block},
  };
}

}  // namespace gridblock::service
