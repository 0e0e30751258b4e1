// pipeline.hpp - parse, lower, execute and judge one submission
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "gridblock/executor.hpp"
#include "gridblock/program.hpp"
#include "gridblock/task.hpp"
#include "gridblock/verdict.hpp"

namespace gridblock
{

class ValidationFailed : public std::runtime_error
{
public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport & report() const { return report_; }

private:
  ValidationReport report_;
};

struct Evaluation
{
  BlockProgram program;
  ActionSequence actions;
  ExecutionTrace trace;
  Verdict verdict;
};

/**
 * Full submission path against task `t`. Throws ParseError,
 * ValidationFailed, KinematicsError or UnrollBudgetExceeded before any
 * simulation happens.
 */
Evaluation evaluate(std::string_view xml, const TaskSpec & t);

/// Same as evaluate for an already parsed program.
Evaluation evaluate(BlockProgram program, const TaskSpec & t);

nlohmann::ordered_json validation_to_json(const ValidationReport & r);

}  // namespace gridblock
