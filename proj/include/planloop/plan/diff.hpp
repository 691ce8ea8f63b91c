#pragma once

#include "planloop/plan/ast.hpp"

namespace planloop::plan {

// Smallest sub-goal index whose statements (comment text excluded) differ
// between the two plans; min(N_old, N_new)+1 when the shared prefix matches,
// so identical plans yield N+1.
int diff_first_divergence(const PlanAst& old_plan, const PlanAst& new_plan);

} // namespace planloop::plan
