#include "planloop/env/household.hpp"

#include <algorithm>
#include <cctype>

namespace planloop::env {

namespace {

constexpr const char* kNothing = "Nothing happens.";

struct IdKey {
    std::string cls;
    int index = 0;

    bool operator<(const IdKey& other) const {
        if (cls != other.cls) return cls < other.cls;
        return index < other.index;
    }
};

IdKey id_key(const std::string& id) {
    auto pos = id.rfind(' ');
    if (pos == std::string::npos) return {id, 0};
    std::string tail = id.substr(pos + 1);
    if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](unsigned char c) {
            return std::isdigit(c);
        }))
        return {id, 0};
    return {id.substr(0, pos), std::stoi(tail)};
}

// "a knife 1, a lettuce 1, and a soapbottle 1" (comma before the and, as the
// room transcripts phrase it), or "nothing".
std::string list_phrase(std::vector<std::string> ids) {
    if (ids.empty()) return "nothing";
    std::sort(ids.begin(), ids.end(),
              [](const std::string& a, const std::string& b) { return id_key(a) < id_key(b); });
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        if (i + 1 == ids.size() && ids.size() > 1) out += "and ";
        out += "a " + ids[i];
    }
    return out;
}

bool contains(const std::vector<std::string>& contents, const std::string& id) {
    return std::find(contents.begin(), contents.end(), id) != contents.end();
}

std::string surface_command(const std::string& action, const std::vector<std::string>& args) {
    if (action == "goto") return "go to " + args[0];
    if (action == "take") return "take " + args[0] + " from " + args[1];
    if (action == "put") return "put " + args[0] + " in/on " + args[1];
    if (action == "open") return "open " + args[0];
    if (action == "close") return "close " + args[0];
    if (action == "clean") return "clean " + args[0] + " with " + args[1];
    if (action == "heat") return "heat " + args[0] + " with " + args[1];
    if (action == "cool") return "cool " + args[0] + " with " + args[1];
    return "use " + args[0];
}

std::string apply(HouseholdState& state, const std::string& action,
                  const std::vector<std::string>& args) {
    auto recep_at = [&](const std::string& id) -> Receptacle* {
        auto it = state.receptacles.find(id);
        return it == state.receptacles.end() ? nullptr : &it->second;
    };

    if (action == "goto") {
        Receptacle* recep = recep_at(args[0]);
        if (!recep || state.agent_location == args[0]) return kNothing;
        state.agent_location = args[0];
        if (recep->openable && !recep->open) return "The " + args[0] + " is closed.";
        if (recep->openable)
            return "The " + args[0] + " is open. In it, you see " + list_phrase(recep->contents) +
                   ".";
        return "On the " + args[0] + ", you see " + list_phrase(recep->contents) + ".";
    }

    if (action == "take") {
        Receptacle* recep = recep_at(args[1]);
        bool legal = recep && !state.held && state.agent_location == args[1] &&
                     (!recep->openable || recep->open) && contains(recep->contents, args[0]);
        if (!legal) return kNothing;
        recep->contents.erase(
            std::find(recep->contents.begin(), recep->contents.end(), args[0]));
        state.held = args[0];
        return "You pick up the " + args[0] + " from the " + args[1] + ".";
    }

    if (action == "put") {
        Receptacle* recep = recep_at(args[1]);
        bool legal = recep && state.held == args[0] && state.agent_location == args[1] &&
                     (!recep->openable || recep->open);
        if (!legal) return kNothing;
        recep->contents.push_back(args[0]);
        state.held.reset();
        return "You put the " + args[0] + " in/on the " + args[1] + ".";
    }

    if (action == "open") {
        Receptacle* recep = recep_at(args[0]);
        bool legal = recep && state.agent_location == args[0] && recep->openable && !recep->open;
        if (!legal) return kNothing;
        recep->open = true;
        return "You open the " + args[0] + ". The " + args[0] + " is open. In it, you see " +
               list_phrase(recep->contents) + ".";
    }

    if (action == "close") {
        Receptacle* recep = recep_at(args[0]);
        bool legal = recep && state.agent_location == args[0] && recep->openable && recep->open;
        if (!legal) return kNothing;
        recep->open = false;
        return "You close the " + args[0] + ".";
    }

    if (action == "clean" || action == "heat" || action == "cool") {
        const char* appliance = action == "clean" ? "sinkbasin"
                                : action == "heat" ? "microwave"
                                                   : "fridge";
        Receptacle* recep = recep_at(args[1]);
        auto obj = state.objects.find(args[0]);
        bool legal = recep && state.agent_location == args[1] &&
                     id_key(args[1]).cls == appliance && state.held == args[0] &&
                     obj != state.objects.end();
        if (legal) {
            ObjectInfo& info = obj->second;
            if (action == "clean" && !info.clean) {
                info.clean = true;
                return "You clean the " + args[0] + " using the " + args[1] + ".";
            }
            if (action == "heat" && (!info.hot || info.cold)) {
                info.hot = true;
                info.cold = false;
                return "You heat the " + args[0] + " using the " + args[1] + ".";
            }
            if (action == "cool" && (!info.cold || info.hot)) {
                info.cold = true;
                info.hot = false;
                return "You cool the " + args[0] + " using the " + args[1] + ".";
            }
        }
        return kNothing;
    }

    // use
    Receptacle* here = recep_at(state.agent_location);
    auto obj = state.objects.find(args[0]);
    bool legal = here && obj != state.objects.end() && obj->second.lamp && !obj->second.used &&
                 contains(here->contents, args[0]);
    if (!legal) return kNothing;
    obj->second.used = true;
    return "You turn on the " + args[0] + ".";
}

} // namespace

const char* task_type_name(TaskType type) {
    switch (type) {
    case TaskType::Pick: return "Pick";
    case TaskType::Clean: return "Clean";
    case TaskType::Heat: return "Heat";
    case TaskType::Cool: return "Cool";
    case TaskType::Examine: return "Examine";
    case TaskType::PickTwo: return "PickTwo";
    }
    return "Pick";
}

std::optional<TaskType> task_type_from_name(const std::string& name) {
    for (TaskType type : {TaskType::Pick, TaskType::Clean, TaskType::Heat, TaskType::Cool,
                          TaskType::Examine, TaskType::PickTwo})
        if (name == task_type_name(type)) return type;
    return std::nullopt;
}

const std::vector<ActionInfo>& household_catalog() {
    static const std::vector<ActionInfo> catalog = {
        {"goto", 1, "go to a receptacle"},
        {"take", 2, "pick up an object from the receptacle you are at"},
        {"put", 2, "put the object you hold in or on the receptacle you are at"},
        {"open", 1, "open a closed receptacle you are at"},
        {"close", 1, "close an open receptacle you are at"},
        {"clean", 2, "clean the object you hold using a sinkbasin you are at"},
        {"heat", 2, "heat the object you hold using a microwave you are at"},
        {"cool", 2, "cool the object you hold using a fridge you are at"},
        {"use", 1, "turn on a lamp at your location"},
    };
    return catalog;
}

plan::ActionCatalog to_plan_catalog(const std::vector<ActionInfo>& catalog) {
    plan::ActionCatalog out;
    for (const ActionInfo& info : catalog) out.push_back({info.name, info.arity});
    return out;
}

Result<std::string> step(EnvSession& session, const std::string& action,
                         const std::vector<std::string>& args) {
    const ActionInfo* info = nullptr;
    for (const ActionInfo& candidate : household_catalog())
        if (candidate.name == action) info = &candidate;
    if (!info) return Result<std::string>::failure("unknown action '" + action + "'");
    if (static_cast<int>(args.size()) != info->arity)
        return Result<std::string>::failure("action '" + action + "' expects " +
                                            std::to_string(info->arity) + " arguments, got " +
                                            std::to_string(args.size()));
    std::string observation = apply(session.state, action, args);
    session.interaction_log.emplace_back(surface_command(action, args), observation);
    ++session.step_count;
    return observation;
}

std::string object_class(const std::string& object_id) { return id_key(object_id).cls; }

bool goal_met(const EnvSession& session) {
    const HouseholdState& state = session.state;
    const TaskInstance& task = session.task;

    auto in_target_with = [&](auto&& predicate) {
        auto it = state.receptacles.find(task.target_receptacle);
        if (it == state.receptacles.end()) return 0;
        int count = 0;
        for (const std::string& id : it->second.contents)
            if (object_class(id) == task.target_object_class &&
                predicate(state.objects.at(id)))
                ++count;
        return count;
    };
    auto any_flag = [](const ObjectInfo&) { return true; };

    switch (task.task_type) {
    case TaskType::Pick: return in_target_with(any_flag) >= 1;
    case TaskType::Clean:
        return in_target_with([](const ObjectInfo& o) { return o.clean; }) >= 1;
    case TaskType::Heat: return in_target_with([](const ObjectInfo& o) { return o.hot; }) >= 1;
    case TaskType::Cool: return in_target_with([](const ObjectInfo& o) { return o.cold; }) >= 1;
    case TaskType::PickTwo: return in_target_with(any_flag) >= 2;
    case TaskType::Examine: {
        if (!state.held || object_class(*state.held) != task.target_object_class) return false;
        auto here = state.receptacles.find(state.agent_location);
        if (here == state.receptacles.end()) return false;
        for (const std::string& id : here->second.contents) {
            const ObjectInfo& info = state.objects.at(id);
            if (info.lamp && info.used) return true;
        }
        return false;
    }
    }
    return false;
}

Introspection introspect(const EnvSession& session) {
    Introspection view;
    view.agent_location = session.state.agent_location;
    view.held = session.state.held;
    std::size_t n = session.interaction_log.size();
    for (std::size_t i = n > 3 ? n - 3 : 0; i < n; ++i)
        view.last_interactions.push_back(session.interaction_log[i]);
    return view;
}

std::vector<std::string> receptacle_ids(const HouseholdState& state) {
    std::vector<std::string> ids;
    for (const auto& [id, recep] : state.receptacles) ids.push_back(id);
    std::sort(ids.begin(), ids.end(),
              [](const std::string& a, const std::string& b) { return id_key(a) < id_key(b); });
    return ids;
}

std::string initial_observation(const HouseholdState& state) {
    std::vector<std::string> ids = receptacle_ids(state);
    // Room descriptions list each class with indices descending.
    std::stable_sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
        IdKey ka = id_key(a), kb = id_key(b);
        if (ka.cls != kb.cls) return ka.cls < kb.cls;
        return ka.index > kb.index;
    });
    std::string out = "You are in the middle of a room. Looking quickly around you, you see ";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        if (i + 1 == ids.size() && ids.size() > 1) out += "and ";
        out += "a " + ids[i];
    }
    return out + ".";
}

} // namespace planloop::env
