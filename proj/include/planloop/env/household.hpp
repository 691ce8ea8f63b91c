#pragma once

#include "planloop/plan/validate.hpp"
#include "planloop/result.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace planloop::env {

enum class TaskType { Pick, Clean, Heat, Cool, Examine, PickTwo };

const char* task_type_name(TaskType type);
std::optional<TaskType> task_type_from_name(const std::string& name);

struct ObjectInfo {
    bool clean = false;
    bool hot = false;
    bool cold = false;
    bool lamp = false;
    bool used = false; // lamps only; permanent within the episode

    bool operator==(const ObjectInfo&) const = default;
};

struct Receptacle {
    bool openable = false;
    bool open = false;
    std::vector<std::string> contents; // object ids, insertion order

    bool operator==(const Receptacle&) const = default;
};

struct HouseholdState {
    std::map<std::string, Receptacle> receptacles;
    std::map<std::string, ObjectInfo> objects;
    std::string agent_location = "start";
    std::optional<std::string> held;

    bool operator==(const HouseholdState&) const = default;
};

struct TaskInstance {
    TaskType task_type = TaskType::Pick;
    std::string goal_text;
    std::string target_object_class;
    std::string target_receptacle; // for Examine: where the desklamp sits
    unsigned seed = 0;
};

struct ActionInfo {
    std::string name;
    int arity = 0;
    std::string description;
};

// goto/take/put/open/close/clean/heat/cool/use with ALFWorld-style semantics.
const std::vector<ActionInfo>& household_catalog();

// Adapter for the plan validator.
plan::ActionCatalog to_plan_catalog(const std::vector<ActionInfo>& catalog);

struct EnvSession {
    HouseholdState state;
    TaskInstance task;
    std::string initial_observation;
    int step_count = 0;
    // ALFWorld surface commands ("take lettuce 1 from countertop 2") paired
    // with the observation each produced.
    std::vector<std::pair<std::string, std::string>> interaction_log;
};

struct GeneratedTask {
    TaskInstance task;
    HouseholdState state;
    std::string initial_observation;
};

// Seeded world: fixed floorplan of 17 receptacles, ≥15 objects, target
// object(s) placed uniformly away from the target receptacle.
GeneratedTask generate_task(TaskType type, unsigned seed);

EnvSession make_session(TaskType type, unsigned seed);

// Deterministic transition; illegal actions leave the state unchanged and
// observe "Nothing happens.". The step is logged and counted either way.
// Unknown action names / wrong arity are rejected without a step.
Result<std::string> step(EnvSession& session, const std::string& action,
                         const std::vector<std::string>& args);

bool goal_met(const EnvSession& session);

struct Introspection {
    std::string agent_location;
    std::optional<std::string> held;
    std::vector<std::pair<std::string, std::string>> last_interactions; // ≤3
};

Introspection introspect(const EnvSession& session);

// "lettuce 1" → "lettuce".
std::string object_class(const std::string& object_id);

// All receptacle ids, class-alphabetical with ascending indices (the order
// used for prompt receptacle lists).
std::vector<std::string> receptacle_ids(const HouseholdState& state);

// The "You are in the middle of a room..." line (descending indices, as the
// room description lists them).
std::string initial_observation(const HouseholdState& state);

} // namespace planloop::env
