// gridblock - command-line front end: run, check and trace block programs
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gridblock/oracles.hpp"
#include "gridblock/pipeline.hpp"
#include "gridblock/service/server.hpp"
#include "gridblock/service/wire.hpp"

using namespace gridblock;
using ojson = nlohmann::ordered_json;

namespace
{

constexpr int kOk = 0;
constexpr int kIncorrect = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Options
{
  std::string task;
  std::string program;
  std::string format = "json";
  std::string policies;
  int port = -1;
};

TaskSpec resolve_task(const Options & o)
{
  if (o.task.empty()) throw UsageError("--task is required");
  TaskSpec t;
  if (const auto * b = find_builtin(o.task)) {
    t = *b;
  } else if (o.task.size() > 5 && o.task.ends_with(".json")) {
    try {
      t = load_task(std::string_view(read_file(o.task)));
    } catch (const TaskLoadError & e) {
      throw UsageError(o.task + ": " + e.what());
    }
  } else {
    throw UsageError("unknown task '" + o.task + "' (see `gridblock tasks`)");
  }
  if (!o.policies.empty()) {
    const auto j = nlohmann::json::parse(read_file(o.policies), nullptr, false);
    if (j.is_discarded()) throw UsageError(o.policies + ": not valid JSON");
    try {
      t = with_policy_overrides(std::move(t), j);
    } catch (const TaskLoadError & e) {
      throw UsageError(o.policies + ": " + e.what());
    }
  }
  return t;
}

Evaluation evaluate_file(const Options & o, const TaskSpec & t)
{
  if (o.program.empty()) throw UsageError("--program is required");
  const auto xml = read_file(o.program);
  try {
    return evaluate(std::string_view(xml), t);
  } catch (const ParseError & e) {
    throw UsageError(o.program + ": " + std::string(to_string(e.kind())) + ": " + e.what());
  } catch (const ValidationFailed & e) {
    std::string msg = o.program + ": invalid program";
    for (const auto & i : e.report().issues) msg += "\n  " + i.location + " (" + i.block_type + "): " + i.message;
    throw UsageError(msg);
  } catch (const KinematicsError & e) {
    throw UsageError(o.program + ": " + e.what());
  } catch (const UnrollBudgetExceeded & e) {
    throw UsageError(o.program + ": " + e.what());
  }
}

void print_json(const ojson & j) { std::cout << j.dump(2) << "\n"; }

void print_verdict_text(const Verdict & v)
{
  std::cout << (v.is_correct ? "correct" : "incorrect") << ": " << v.feedback_text << "\n";
  if (v.fault) {
    std::cout << "first fault: " << to_string(v.fault->kind) << " at " << format_cell(v.fault->cell) << " (primitive "
              << v.fault->primitive_index << ", step " << v.fault->step_index << ")\n";
  }
  if (v.failed_check) std::cout << "failed check: " << *v.failed_check << "\n";
}

void print_trace_text(const ExecutionTrace & tr)
{
  std::cout << "visited:";
  for (auto c : tr.visited) std::cout << " " << format_cell(c);
  std::cout << "\nfinal pose: " << format_cell(tr.final_pose().cell) << " " << to_string(tr.final_pose().facing) << "\n";
  if (const auto e = tr.final_energy()) std::cout << "final energy: " << *e << "\n";
  for (const auto & f : tr.faults) {
    std::cout << "fault: " << to_string(f.kind) << " at " << format_cell(f.cell) << " - " << f.detail << "\n";
  }
}

int cmd_tasks(const Options & o)
{
  if (o.format == "text") {
    for (const auto & t : builtin_tasks()) std::cout << t.id << "\n";
    return kOk;
  }
  // one JSON object per line
  for (const auto & t : builtin_tasks()) std::cout << ojson{{"id", t.id}, {"title", t.title}}.dump() << "\n";
  return kOk;
}

int cmd_run(const Options & o)
{
  const auto t = resolve_task(o);
  const auto e = evaluate_file(o, t);
  if (o.format == "text") {
    print_trace_text(e.trace);
    for (const auto & c : service::emit_wire(e.actions)) std::cout << service::format_line(c) << "\n";
    print_verdict_text(e.verdict);
  } else {
    ojson j;
    j["trace"] = trace_to_json(e.trace);
    j["wire"] = service::wire_to_json(service::emit_wire(e.actions));
    j["verdict"] = verdict_to_json(e.verdict);
    print_json(j);
  }
  return e.verdict.is_correct ? kOk : kIncorrect;
}

int cmd_check(const Options & o)
{
  const auto t = resolve_task(o);
  const auto e = evaluate_file(o, t);
  if (o.format == "text") print_verdict_text(e.verdict);
  else print_json(verdict_to_json(e.verdict));
  return e.verdict.is_correct ? kOk : kIncorrect;
}

int cmd_trace(const Options & o)
{
  const auto t = resolve_task(o);
  const auto e = evaluate_file(o, t);
  if (o.format == "text") print_trace_text(e.trace);
  else print_json(trace_to_json(e.trace));
  return kOk;
}

ojson cells_json(const std::vector<Cell> & cells)
{
  auto arr = ojson::array();
  for (auto c : cells) arr.push_back({c.x, c.y});
  return arr;
}

int cmd_solve(const Options & o)
{
  const auto t = resolve_task(o);
  ojson out;
  out["task"] = t.id;

  if (!t.triggers.empty()) {
    auto legs = ojson::array();
    Cell from = t.start.cell;
    for (const auto & tr : t.triggers) {
      const auto n = shortest_path_len(t, from, tr.cell);
      legs.push_back(
        {{"from", {from.x, from.y}}, {"to", {tr.cell.x, tr.cell.y}}, {"label", tr.label},
         {"length", n ? ojson(*n) : ojson(nullptr)}});
      from = tr.cell;
    }
    out["shortestPaths"] = legs;
  } else if (!t.river.empty()) {
    const auto plan = river_solver(t);
    out["crossings"] = plan ? ojson(plan->size()) : ojson(nullptr);
    out["plan"] = plan ? plan_to_json(*plan) : ojson(nullptr);
    if (plan) {
      const auto program = plan_to_program(*plan, t);
      out["program"] = serialize_program(program);
      out["accepted"] = evaluate(program, t).verdict.is_correct;
    }
  } else if (std::holds_alternative<KnightFullCover>(t.success)) {
    KnightCheckOptions k;
    k.intermediates_count = t.policies.knight_intermediates_count;
    k.intermediates_block = t.policies.knight_intermediates_block;
    out["referenceCheck"] = knight_report_to_json(knight_reference_check(k));
  } else if (!t.minerals.empty()) {
    const auto route = mineral_route_search(t);
    out["route"] = route ? cells_json(*route) : ojson(nullptr);
    if (route) {
      const auto e = evaluate(path_to_program(t.start, *route), t);
      out["program"] = e.verdict.echo_xml.value_or("");
      out["finalEnergy"] = e.trace.final_energy() ? ojson(*e.trace.final_energy()) : ojson(nullptr);
      out["accepted"] = e.verdict.is_correct;
    }
  } else if (t.id == task_ids::kTileCleaning) {
    const auto e = evaluate(tile_cleaning_reference(), t);
    out["program"] = e.verdict.echo_xml.value_or("");
    out["visited"] = e.trace.visited.size();
    out["accepted"] = e.verdict.is_correct;
  } else {
    throw UsageError("no solver for task '" + t.id + "'");
  }

  if (o.format == "text") std::cout << out.dump() << "\n";
  else print_json(out);
  return kOk;
}

int cmd_serve(const Options & o)
{
  service::ServerOptions so;
  so.port = o.port >= 0 ? static_cast<std::uint16_t>(o.port) : service::port_from_env();
  if (!o.task.empty()) {
    if (!find_builtin(o.task)) throw UsageError("unknown task '" + o.task + "'");
    so.default_task = o.task;
  }
  service::Server server(service::TaskRegistry::builtin(), so);
  server.start();
  std::cerr << "gridblock: listening on ws://" << so.address << ":" << server.port() << so.path << std::endl;
  server.wait(true);
  return kOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"gridblock: run and check block programs for the 5x5 robot grid"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_task = [&](CLI::App * sub, bool required) {
    auto * opt = sub->add_option("--task", o.task, "built-in task id or a task .json file");
    if (required) opt->required();
    sub->add_option("--policies", o.policies, "JSON file of policy overrides");
  };
  auto add_format = [&](CLI::App * sub) {
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
  };

  auto * tasks = app.add_subcommand("tasks", "list the built-in tasks");
  add_format(tasks);
  auto * run = app.add_subcommand("run", "execute a program and print trace, wire commands and verdict");
  auto * check = app.add_subcommand("check", "judge a program and print the verdict");
  auto * trace = app.add_subcommand("trace", "execute a program and print the canonical trace");
  for (auto * sub : {run, check, trace}) {
    add_task(sub, true);
    sub->add_option("--program", o.program, "Blockly XML file")->required();
    add_format(sub);
  }
  auto * solve = app.add_subcommand("solve", "run the search oracle for a task");
  add_task(solve, true);
  add_format(solve);
  auto * serve = app.add_subcommand("serve", "start the WebSocket service");
  serve->add_option("--port", o.port, "listen port (default $GRIDBLOCK_PORT or 8765)")->check(CLI::Range(0, 65535));
  serve->add_option("--task", o.task, "task for new sessions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*tasks) return cmd_tasks(o);
    if (*run) return cmd_run(o);
    if (*check) return cmd_check(o);
    if (*trace) return cmd_trace(o);
    if (*solve) return cmd_solve(o);
    if (*serve) return cmd_serve(o);
  } catch (const UsageError & e) {
    std::cerr << "gridblock: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception & e) {
    std::cerr << "gridblock: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
