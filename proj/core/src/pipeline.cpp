#include "gridblock/pipeline.hpp"

namespace gridblock
{

namespace
{

std::string summarize(const ValidationReport & r)
{
  if (r.issues.empty()) return "program is valid";
  const auto & first = r.issues.front();
  std::string s = first.location + ": " + first.message;
  if (r.issues.size() > 1) s += " (and " + std::to_string(r.issues.size() - 1) + " more)";
  return s;
}

}  // namespace

ValidationFailed::ValidationFailed(ValidationReport report)
: std::runtime_error(summarize(report)), report_(std::move(report))
{
}

Evaluation evaluate(BlockProgram program, const TaskSpec & t)
{
  auto report = validate_program(program, t.catalog);
  if (!report.ok()) throw ValidationFailed(std::move(report));
  Evaluation e;
  e.actions = lower(program, t.grid);
  e.trace = execute(e.actions, t);
  e.verdict = check(e.trace, program, t);
  e.program = std::move(program);
  return e;
}

Evaluation evaluate(std::string_view xml, const TaskSpec & t)
{
  return evaluate(parse_program(xml, t.catalog), t);
}

nlohmann::ordered_json validation_to_json(const ValidationReport & r)
{
  auto arr = nlohmann::ordered_json::array();
  for (const auto & i : r.issues) {
    arr.push_back({{"location", i.location}, {"blockType", i.block_type}, {"message", i.message}});
  }
  return arr;
}

}  // namespace gridblock
