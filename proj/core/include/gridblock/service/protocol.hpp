// protocol.hpp - JSON frames exchanged with a session, and the handler behind them
#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridblock/service/session.hpp"
#include "gridblock/task.hpp"

namespace gridblock::service
{

namespace frame
{
// client -> server
inline constexpr std::string_view kRun = "RUN";
inline constexpr std::string_view kCheck = "CHECK";
inline constexpr std::string_view kTrace = "TRACE";
inline constexpr std::string_view kSelectTask = "SELECT_TASK";
inline constexpr std::string_view kSay = "SAY";
inline constexpr std::string_view kPrompt = "PROMPT";
// server -> client
inline constexpr std::string_view kVerdict = "VERDICT";
inline constexpr std::string_view kWire = "WIRE";
inline constexpr std::string_view kError = "ERROR";
inline constexpr std::string_view kSession = "SESSION";
inline constexpr std::string_view kTask = "TASK";
inline constexpr std::string_view kAck = "ACK";
}  // namespace frame

struct ClientMessage
{
  std::string type;
  nlohmann::json payload = nlohmann::json::object();
};

struct ServerMessage
{
  std::string type;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  std::string encode() const;
};

class ProtocolError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Decode a `{type, payload}` text frame. Throws ProtocolError.
ClientMessage decode_frame(std::string_view text);

ServerMessage error_frame(std::string code, std::string message, nlohmann::ordered_json details = nullptr);

/// Read-only id -> task map shared by every session.
class TaskRegistry
{
public:
  TaskRegistry() = default;
  static TaskRegistry builtin();

  void add(TaskSpec t);
  const TaskSpec * find(std::string_view id) const;
  std::vector<std::string> ids() const;

private:
  std::map<std::string, TaskSpec, std::less<>> tasks_;
};

/**
 * Apply one client message to `s` and return the reply frames.
 *
 * RUN answers VERDICT {verdict, trace} then WIRE {commands}; CHECK answers
 * VERDICT only, with the same verdict RUN would give. Any failure answers a
 * single ERROR frame and leaves `s` untouched.
 */
std::vector<ServerMessage> handle_message(Session & s, const ClientMessage & msg, const TaskRegistry & tasks);

/// Decode and handle a raw text frame; malformed frames become ERROR replies.
std::vector<ServerMessage> handle_frame(Session & s, std::string_view text, const TaskRegistry & tasks);

/// A session plus the lock that serializes its messages.
struct SessionSlot
{
  std::mutex mutex;
  Session session;
  std::chrono::steady_clock::time_point last_used;
};

/**
 * Live sessions keyed by id. Insert, lookup and expiry are synchronized;
 * each slot's own mutex orders the messages of that session.
 */
class SessionTable
{
public:
  using Clock = std::chrono::steady_clock;

  explicit SessionTable(std::chrono::seconds idle_limit = std::chrono::minutes(30));

  std::shared_ptr<SessionSlot> create(std::string task_id);
  /// Existing session or nullptr; refreshes its idle clock.
  std::shared_ptr<SessionSlot> find(const std::string & id);
  /// Drop sessions idle longer than the limit as of `now`; returns how many.
  std::size_t expire(Clock::time_point now = Clock::now());
  std::size_t size() const;

private:
  std::chrono::seconds idle_limit_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<SessionSlot>> slots_;
  std::uint64_t counter_ = 0;
};

}  // namespace gridblock::service
