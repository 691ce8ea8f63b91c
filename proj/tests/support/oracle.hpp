#pragma once

#include "planloop/env/household.hpp"

#include <string>
#include <utility>
#include <vector>

namespace testsupport {

using ActionStep = std::pair<std::string, std::vector<std::string>>;

// Shortest sensible action sequence solving the session's task, derived from
// ground-truth world state (not from observations).
std::vector<ActionStep> oracle_actions(const planloop::env::EnvSession& session);

// Independent success predicate over raw state, used to cross-check goal_met.
bool brute_force_goal(const planloop::env::EnvSession& session);

} // namespace testsupport
