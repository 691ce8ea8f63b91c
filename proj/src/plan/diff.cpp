#include "planloop/plan/diff.hpp"

#include <algorithm>

namespace planloop::plan {

namespace {

// Comment text is cosmetic; only statements and assertions count.
bool same_structure(const SubGoal& a, const SubGoal& b) {
    return a.body == b.body && a.assertion == b.assertion;
}

} // namespace

int diff_first_divergence(const PlanAst& old_plan, const PlanAst& new_plan) {
    int shared = std::min(old_plan.subgoal_count(), new_plan.subgoal_count());
    for (int i = 0; i < shared; ++i)
        if (!same_structure(old_plan.subgoals[i], new_plan.subgoals[i])) return i + 1;
    return shared + 1;
}

} // namespace planloop::plan
