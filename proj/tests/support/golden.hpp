#pragma once

#include <string>

// Frozen plan texts for the lettuce walkthrough used across unit,
// controller, and acceptance tests. Both parse to canonical form.
namespace testsupport {

// Six sub-goals; cleaning step lacks the goto-sinkbasin, so its assertion
// fails at runtime.
std::string golden_initial_plan();

// Same plan with the go-to-sinkbasin action added inside sub-goal 3
// (first structural divergence: 3).
std::string golden_revised_plan();

} // namespace testsupport
