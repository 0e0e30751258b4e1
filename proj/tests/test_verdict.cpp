#include <doctest.h>

#include "gridblock/oracles.hpp"
#include "gridblock/pipeline.hpp"
#include "gridblock/verdict.hpp"
#include "support.hpp"

using namespace gridblock;

namespace
{

Verdict judge(const std::string & fixture, std::string_view task_id)
{
  return evaluate(support::fixture(fixture), support::task(task_id)).verdict;
}

Verdict judge(const BlockProgram & p, std::string_view task_id) { return evaluate(p, support::task(task_id)).verdict; }

Statement mv(RelDir d, int cells) { return {Move{d, 300, static_cast<double>(cells)}}; }

StatementList sweep(int row) { return {mv(RelDir::Forward, row), mv(RelDir::Left, 1), mv(RelDir::Backward, row), mv(RelDir::Left, 1)}; }

// Covers the whole tile board without any procedure or loop.
StatementList flat_cover()
{
  StatementList out;
  for (int i = 0; i < 2; ++i) {
    auto s = sweep(4);
    out.insert(out.end(), s.begin(), s.end());
  }
  out.push_back(mv(RelDir::Forward, 4));
  return out;
}

void check_json_shape(const Verdict & v)
{
  const auto j = verdict_to_json(v);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"text", "xml", "is_correct", "return_button"});
  CHECK(j["return_button"] == j["is_correct"]);
  CHECK(j["text"].get<std::string>() == v.feedback_text);
  CHECK_FALSE(v.feedback_text.empty());
}

}  // namespace

TEST_CASE("accepted programs for every built-in task")
{
  const std::pair<const char *, std::string_view> accepted[] = {
    {"tile_cleaning_reference.xml", task_ids::kTileCleaning},
    {"secret_realm_translate.xml", task_ids::kSecretRealm},
    {"secret_realm_turns.xml", task_ids::kSecretRealm},
    {"mineral_corrected.xml", task_ids::kMineral},
    {"river_classical.xml", task_ids::kRiverCrossing},
    {"knights_reference.xml", task_ids::kKnightsTour},
  };
  for (const auto & [file, id] : accepted) {
    INFO(file);
    const auto v = judge(file, id);
    CHECK(v.is_correct);
    CHECK(v.return_button);
    CHECK_FALSE(v.fault);
    CHECK_FALSE(v.failed_check);
    REQUIRE(v.echo_xml);
    CHECK(parse_program(*v.echo_xml) == parse_program(support::fixture(file)));
    check_json_shape(v);
  }
}

TEST_CASE("golden faults")
{
  struct Case
  {
    const char * file;
    std::string_view task;
    IssueKind kind;
    Cell cell;
    const char * template_id;
  };
  const Case cases[] = {
    {"tile_cleaning_loop3.xml", task_ids::kTileCleaning, IssueKind::OutOfBounds, {4, 5}, "fault.out_of_bounds"},
    {"secret_realm_obstacle.xml", task_ids::kSecretRealm, IssueKind::ObstacleCollision, {1, 3}, "fault.obstacle_collision"},
    {"mineral_wrong_route.xml", task_ids::kMineral, IssueKind::MineralSkippedNoEnergy, {1, 3}, "issue.mineral_skipped"},
    {"river_unsafe.xml", task_ids::kRiverCrossing, IssueKind::WrongBankAction, {2, 0}, "fault.wrong_bank_action"},
  };
  for (const auto & c : cases) {
    INFO(c.file);
    const auto v = judge(c.file, c.task);
    CHECK_FALSE(v.is_correct);
    CHECK_FALSE(v.return_button);
    REQUIRE(v.fault);
    CHECK(v.fault->kind == c.kind);
    CHECK(v.fault->cell == c.cell);
    CHECK(v.fault->template_id == c.template_id);
    CHECK(v.feedback_text.find(format_cell(c.cell)) != std::string::npos);
    check_json_shape(v);
  }
}

TEST_CASE("mineral wrong route ends with no energy at the skipped mineral")
{
  const auto e = evaluate(support::fixture("mineral_wrong_route.xml"), support::task(task_ids::kMineral));
  CHECK(e.trace.final_energy() == 0);
  CHECK(e.trace.final_pose().cell == Cell{1, 3});
  // the skipped mineral precedes the depletion fault and is what gets reported
  REQUIRE_FALSE(e.trace.faults.empty());
  CHECK(e.trace.faults[0].kind == FaultKind::EnergyDepleted);
  CHECK(e.verdict.fault->kind == IssueKind::MineralSkippedNoEnergy);
}

TEST_CASE("golden failed checks")
{
  CHECK(judge("tile_cleaning_flat.xml", task_ids::kTileCleaning).failed_check == "structure.procedure_missing");
  CHECK(judge("secret_realm_shortcut.xml", task_ids::kSecretRealm).failed_check == "path.mismatch");
  CHECK(judge("empty.xml", task_ids::kTileCleaning).failed_check == "coverage.incomplete");
  CHECK(judge("empty.xml", task_ids::kSecretRealm).failed_check == "path.mismatch");
  CHECK(judge("empty.xml", task_ids::kMineral).failed_check == "minerals.uncollected");
  CHECK(judge("empty.xml", task_ids::kRiverCrossing).failed_check == "items.not_transported");
  CHECK(judge("empty.xml", task_ids::kKnightsTour).failed_check == "knight.coverage");
}

TEST_CASE("tile cleaning structural checks")
{
  BlockProgram wrong_steps;
  wrong_steps.procedures["clean"] = {mv(RelDir::Forward, 4), mv(RelDir::Left, 1), mv(RelDir::Backward, 4)};
  wrong_steps.main = flat_cover();
  CHECK(judge(wrong_steps, task_ids::kTileCleaning).failed_check == "structure.procedure_steps");

  BlockProgram wrong_pattern;
  wrong_pattern.procedures["clean"] = sweep(3);
  wrong_pattern.main = flat_cover();
  CHECK(judge(wrong_pattern, task_ids::kTileCleaning).failed_check == "structure.procedure_pattern");

  BlockProgram no_loop;
  no_loop.procedures["clean"] = sweep(4);
  no_loop.main = {{ProcCall{"clean"}}, {ProcCall{"clean"}}, mv(RelDir::Forward, 4)};
  CHECK(judge(no_loop, task_ids::kTileCleaning).failed_check == "structure.loop_missing");

  BlockProgram loop_once;
  loop_once.procedures["clean"] = sweep(4);
  loop_once.main = {{RepeatLoop{1, {{ProcCall{"clean"}}}}}, {ProcCall{"clean"}}, mv(RelDir::Forward, 4)};
  const auto v = judge(loop_once, task_ids::kTileCleaning);
  CHECK(v.failed_check == "structure.loop_times");
  CHECK(v.feedback_text.find("2 times") != std::string::npos);

  // the shape is all that matters, not the procedure's name
  BlockProgram renamed;
  renamed.procedures["sweep_pair"] = sweep(4);
  renamed.main = {{RepeatLoop{2, {{ProcCall{"sweep_pair"}}}}}, mv(RelDir::Forward, 4)};
  CHECK(judge(renamed, task_ids::kTileCleaning).is_correct);
  CHECK(judge(tile_cleaning_reference(), task_ids::kTileCleaning).is_correct);
}

TEST_CASE("energy bound is checked after collection")
{
  TaskSpec greedy = support::task(task_ids::kMineral);
  std::get<CollectAllMinerals>(greedy.success).min_final_energy_exclusive = 10;
  const auto v = evaluate(support::fixture("mineral_corrected.xml"), greedy).verdict;
  CHECK(v.failed_check == "energy.final");
  CHECK(v.feedback_text.find(" 4 ") != std::string::npos);
}

TEST_CASE("earliest issue wins regardless of recording order")
{
  ExecutionTrace tr;
  tr.states = {{{0, 0}, Orientation::North}};
  tr.visited = {{0, 0}};
  tr.faults = {
    {FaultKind::RevisitViolation, 5, 2, {2, 1}, ""},
    {FaultKind::IllegalKnightMove, 2, 0, {1, 1}, "2 by 2"},
  };
  const auto f = first_fault(tr, support::task(task_ids::kKnightsTour));
  REQUIRE(f);
  CHECK(f->kind == IssueKind::IllegalKnightMove);
  CHECK(f->primitive_index == 2);
  CHECK(f->template_id == "fault.illegal_knight_move");

  // same primitive, earlier step wins
  tr.faults = {{FaultKind::RevisitViolation, 2, 3, {2, 1}, ""}, {FaultKind::OutOfBounds, 2, 1, {5, 1}, ""}};
  CHECK(first_fault(tr, support::task(task_ids::kKnightsTour))->kind == IssueKind::OutOfBounds);

  // a fault and a skipped mineral at the same position: the fault is reported
  tr.faults = {{FaultKind::EnergyDepleted, 4, 0, {1, 3}, ""}};
  tr.events = {{MineralSkippedNoEnergy{{1, 3}}, 4, 0}};
  CHECK(first_fault(tr, support::task(task_ids::kMineral))->kind == IssueKind::EnergyDepleted);
  // skipped minerals only count in tasks that have minerals
  tr.faults.clear();
  CHECK(first_fault(tr, support::task(task_ids::kMineral))->kind == IssueKind::MineralSkippedNoEnergy);
  CHECK_FALSE(first_fault(tr, support::task(task_ids::kTileCleaning)));
}

TEST_CASE("illegal knight move reported before a later revisit")
{
  const auto & t = support::task(task_ids::kKnightsTour);
  BlockProgram p;
  p.main = {
    {KnightMove{Side::Right, KnightDirY::Forward, 2, 1, LegOrder::XFirst}},
    {KnightMove{Side::Left, KnightDirY::Backward, 2, 1, LegOrder::YFirst}},
    {KnightMove{Side::Right, KnightDirY::Forward, 2, 2, LegOrder::XFirst}},
  };
  auto faulty = p;
  faulty.main.insert(faulty.main.begin(), {KnightMove{Side::Right, KnightDirY::Forward, 1, 1, LegOrder::XFirst}});
  const auto v = evaluate(faulty, t).verdict;
  REQUIRE(v.fault);
  CHECK(v.fault->kind == IssueKind::IllegalKnightMove);
  CHECK(v.fault->primitive_index == 0);
  CHECK(v.feedback_text.find("action #1") != std::string::npos);

  const auto w = evaluate(p, t).verdict;
  REQUIRE(w.fault);
  CHECK(w.fault->kind == IssueKind::RevisitViolation);
  CHECK(w.fault->primitive_index == 1);
}

TEST_CASE("return_button always mirrors is_correct in json")
{
  Verdict odd;
  odd.is_correct = false;
  odd.return_button = true;
  odd.feedback_text = "x";
  CHECK(verdict_to_json(odd)["return_button"] == false);
  CHECK(verdict_to_json(odd)["xml"].is_null());
}

TEST_CASE("rejection verdict")
{
  const auto v = rejection_verdict("bad block");
  CHECK_FALSE(v.is_correct);
  CHECK(v.failed_check == "program.invalid");
  CHECK_FALSE(v.echo_xml);
  check_json_shape(v);
  CHECK(render_feedback(v) == verdict_to_json(v).dump(2));
}

TEST_CASE("judging is deterministic")
{
  support::ProgramGen gen(5);
  const auto & t = support::task(task_ids::kTileCleaning);
  for (int i = 0; i < 100; ++i) {
    const auto p = gen.program();
    Evaluation a, b;
    try {
      a = evaluate(p, t);
      b = evaluate(p, t);
    } catch (const std::exception &) {
      continue;
    }
    CHECK(a.verdict == b.verdict);
    CHECK(render_feedback(a.verdict) == render_feedback(b.verdict));
  }
}
