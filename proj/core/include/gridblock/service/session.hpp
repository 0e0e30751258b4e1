// session.hpp - per-learner conversation state and prompt assembly
#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "gridblock/task.hpp"

namespace gridblock::service
{

inline constexpr std::size_t kHistoryCap = 20;

struct HistoryEntry
{
  std::string role;  // "user" or "assistant"
  std::string text;

  bool operator==(const HistoryEntry &) const = default;
};

struct Session
{
  std::string session_id;
  std::string task_id;
  std::deque<HistoryEntry> history;
  std::optional<std::string> last_workspace_xml;
  std::optional<nlohmann::ordered_json> last_trace;

  /// Append to the history, evicting the oldest entry beyond kHistoryCap.
  void remember(std::string role, std::string text);

  /// Forget everything learned in the current task and switch to `task`.
  void reset(std::string task);
};

struct PromptBundle
{
  std::string role_preamble;
  std::string task_instructions;
  std::string context_block;
};

class UnknownTask : public std::runtime_error
{
public:
  explicit UnknownTask(const std::string & id) : std::runtime_error("unknown task '" + id + "'") {}
};

/**
 * Three-part prompt for an external tutoring model: the assistant's role,
 * the task's instructions and output contract, and the live context (task
 * layout, capped history, current workspace XML). No model is called.
 */
PromptBundle build_prompt(const TaskSpec & t, const Session & s);

/// Instruction text for tasks without a dedicated template.
std::string generic_instructions(const TaskSpec & t);

nlohmann::ordered_json prompt_to_json(const PromptBundle & b);

}  // namespace gridblock::service
