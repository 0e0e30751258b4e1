#include "gridblock/service/protocol.hpp"

#include <cstdio>
#include <optional>

#include "gridblock/pipeline.hpp"
#include "gridblock/service/wire.hpp"

namespace gridblock::service
{

using ojson = nlohmann::ordered_json;

std::string ServerMessage::encode() const
{
  ojson j;
  j["type"] = type;
  j["payload"] = payload;
  return j.dump();
}

ClientMessage decode_frame(std::string_view text)
{
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("frame is not valid JSON");
  if (!j.is_object()) throw ProtocolError("frame must be a JSON object");
  const auto type = j.find("type");
  if (type == j.end() || !type->is_string()) throw ProtocolError("frame needs a string \"type\"");
  ClientMessage m;
  m.type = type->get<std::string>();
  if (const auto p = j.find("payload"); p != j.end() && !p->is_null()) {
    if (!p->is_object()) throw ProtocolError("\"payload\" must be an object");
    m.payload = *p;
  }
  return m;
}

ServerMessage error_frame(std::string code, std::string message, ojson details)
{
  ServerMessage m{std::string(frame::kError)};
  m.payload["code"] = std::move(code);
  m.payload["message"] = std::move(message);
  if (!details.is_null()) m.payload["details"] = std::move(details);
  return m;
}

TaskRegistry TaskRegistry::builtin()
{
  TaskRegistry r;
  for (const auto & t : builtin_tasks()) r.add(t);
  return r;
}

void TaskRegistry::add(TaskSpec t)
{
  auto id = t.id;
  tasks_.insert_or_assign(std::move(id), std::move(t));
}

const TaskSpec * TaskRegistry::find(std::string_view id) const
{
  const auto it = tasks_.find(id);
  return it == tasks_.end() ? nullptr : &it->second;
}

std::vector<std::string> TaskRegistry::ids() const
{
  std::vector<std::string> out;
  for (const auto & [id, t] : tasks_) out.push_back(id);
  return out;
}

namespace
{

struct Failure
{
  ServerMessage frame;
};

std::string string_field(const ClientMessage & msg, const char * key)
{
  const auto it = msg.payload.find(key);
  if (it == msg.payload.end() || !it->is_string()) {
    throw Failure{error_frame("BAD_PAYLOAD", msg.type + " needs a string \"" + key + "\"")};
  }
  return it->get<std::string>();
}

const TaskSpec & current_task(const Session & s, const TaskRegistry & tasks)
{
  const auto * t = tasks.find(s.task_id);
  if (!t) throw Failure{error_frame("UNKNOWN_TASK", UnknownTask(s.task_id).what())};
  return *t;
}

Evaluation run_pipeline(const std::string & xml, const TaskSpec & t)
{
  try {
    return evaluate(std::string_view(xml), t);
  } catch (const ParseError & e) {
    throw Failure{error_frame(
      "PARSE_ERROR", e.what(),
      {{"kind", to_string(e.kind())}, {"verdict", verdict_to_json(rejection_verdict(e.what()))}})};
  } catch (const ValidationFailed & e) {
    throw Failure{error_frame(
      "INVALID_PROGRAM", e.what(),
      {{"issues", validation_to_json(e.report())}, {"verdict", verdict_to_json(rejection_verdict(e.what()))}})};
  } catch (const KinematicsError & e) {
    throw Failure{error_frame("INVALID_PROGRAM", e.what())};
  } catch (const UnrollBudgetExceeded & e) {
    throw Failure{error_frame("UNROLL_BUDGET", e.what())};
  }
}

std::vector<ServerMessage> submit(Session & s, const ClientMessage & msg, const TaskRegistry & tasks, bool with_wire)
{
  const auto xml = string_field(msg, "xml");
  const auto & t = current_task(s, tasks);
  auto e = run_pipeline(xml, t);

  std::vector<ServerMessage> out;
  ServerMessage verdict{std::string(frame::kVerdict)};
  verdict.payload["verdict"] = verdict_to_json(e.verdict);
  verdict.payload["trace"] = trace_to_json(e.trace);
  out.push_back(std::move(verdict));
  if (with_wire) {
    ServerMessage wire{std::string(frame::kWire)};
    wire.payload["commands"] = wire_to_json(emit_wire(e.actions));
    out.push_back(std::move(wire));
  }

  s.last_workspace_xml = xml;
  s.last_trace = out.front().payload["trace"];
  s.remember("user", xml);
  s.remember("assistant", e.verdict.feedback_text);
  return out;
}

std::vector<ServerMessage> dispatch(Session & s, const ClientMessage & msg, const TaskRegistry & tasks)
{
  if (msg.type == frame::kRun) return submit(s, msg, tasks, true);
  if (msg.type == frame::kCheck) return submit(s, msg, tasks, false);

  if (msg.type == frame::kTrace) {
    if (!s.last_trace) throw Failure{error_frame("NO_TRACE", "nothing has been run in this session yet")};
    ServerMessage m{std::string(frame::kTrace)};
    m.payload["trace"] = *s.last_trace;
    return {m};
  }

  if (msg.type == frame::kSelectTask) {
    const auto id = string_field(msg, "taskId");
    const auto * t = tasks.find(id);
    if (!t) throw Failure{error_frame("UNKNOWN_TASK", UnknownTask(id).what())};
    s.reset(id);
    ServerMessage m{std::string(frame::kTask)};
    m.payload["taskId"] = t->id;
    m.payload["title"] = t->title;
    return {m};
  }

  if (msg.type == frame::kSay) {
    auto text = string_field(msg, "text");
    std::string role = "user";
    if (const auto r = msg.payload.find("role"); r != msg.payload.end()) {
      if (!r->is_string() || (*r != "user" && *r != "assistant")) {
        throw Failure{error_frame("BAD_PAYLOAD", "\"role\" must be \"user\" or \"assistant\"")};
      }
      role = r->get<std::string>();
    }
    s.remember(std::move(role), std::move(text));
    ServerMessage m{std::string(frame::kAck)};
    m.payload["historySize"] = s.history.size();
    return {m};
  }

  if (msg.type == frame::kPrompt) {
    const auto & t = current_task(s, tasks);
    ServerMessage m{std::string(frame::kPrompt)};
    m.payload = prompt_to_json(build_prompt(t, s));
    return {m};
  }

  throw Failure{error_frame("UNKNOWN_TYPE", "unsupported frame type \"" + msg.type + "\"")};
}

}  // namespace

std::vector<ServerMessage> handle_message(Session & s, const ClientMessage & msg, const TaskRegistry & tasks)
{
  // Work on a copy so that a failure leaves the session as it was.
  Session draft = s;
  try {
    auto out = dispatch(draft, msg, tasks);
    s = std::move(draft);
    return out;
  } catch (const Failure & f) {
    return {f.frame};
  }
}

std::vector<ServerMessage> handle_frame(Session & s, std::string_view text, const TaskRegistry & tasks)
{
  try {
    return handle_message(s, decode_frame(text), tasks);
  } catch (const ProtocolError & e) {
    return {error_frame("BAD_FRAME", e.what())};
  }
}

SessionTable::SessionTable(std::chrono::seconds idle_limit) : idle_limit_(idle_limit) {}

std::shared_ptr<SessionSlot> SessionTable::create(std::string task_id)
{
  auto slot = std::make_shared<SessionSlot>();
  slot->session.task_id = std::move(task_id);
  slot->last_used = Clock::now();
  std::lock_guard lock(mutex_);
  char id[32];
  std::snprintf(id, sizeof id, "s%06llu", static_cast<unsigned long long>(++counter_));
  slot->session.session_id = id;
  slots_.emplace(id, slot);
  return slot;
}

std::shared_ptr<SessionSlot> SessionTable::find(const std::string & id)
{
  std::lock_guard lock(mutex_);
  const auto it = slots_.find(id);
  if (it == slots_.end()) return nullptr;
  it->second->last_used = Clock::now();
  return it->second;
}

std::size_t SessionTable::expire(Clock::time_point now)
{
  std::lock_guard lock(mutex_);
  return std::erase_if(slots_, [&](const auto & kv) { return now - kv.second->last_used > idle_limit_; });
}

std::size_t SessionTable::size() const
{
  std::lock_guard lock(mutex_);
  return slots_.size();
}

}  // namespace gridblock::service
