#pragma once

#include "planloop/plan/ast.hpp"
#include "planloop/result.hpp"

#include <string>

namespace planloop::plan {

// Parses a solution function in DSL syntax. Sub-goal boundaries are the
// `# [Step k]` comments; indices must be contiguous from 1 and every
// non-final sub-goal must end with an assert.
Result<PlanAst, ParseError> parse_plan(const std::string& source);

} // namespace planloop::plan
