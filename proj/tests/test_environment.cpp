#include "planloop/env/household.hpp"
#include "support/oracle.hpp"

#include <doctest.h>

#include <random>

using namespace planloop;
using namespace planloop::env;

namespace {

std::string step_ok(EnvSession& session, const std::string& action,
                    const std::vector<std::string>& args) {
    auto result = step(session, action, args);
    REQUIRE(result.ok());
    return result.value();
}

// A session whose world is fully known: lettuce 1 on countertop 2,
// target diningtable 1. Scanned-for seed, guarded below.
constexpr unsigned kLettuceSeed = 2521;

} // namespace

TEST_CASE("same seed generates identical worlds and observations") {
    GeneratedTask a = generate_task(TaskType::Clean, 7);
    GeneratedTask b = generate_task(TaskType::Clean, 7);
    CHECK(a.state == b.state);
    CHECK(a.initial_observation == b.initial_observation);
    CHECK(a.task.goal_text == b.task.goal_text);

    GeneratedTask c = generate_task(TaskType::Clean, 8);
    CHECK_FALSE(a.state == c.state);
}

TEST_CASE("generated worlds satisfy the scale and appliance guarantees") {
    for (TaskType type : {TaskType::Pick, TaskType::Clean, TaskType::Heat, TaskType::Cool,
                          TaskType::Examine, TaskType::PickTwo}) {
        for (unsigned seed : {0u, 1u, 5u, 99u}) {
            GeneratedTask generated = generate_task(type, seed);
            CHECK(generated.state.receptacles.size() >= 12);
            CHECK(generated.state.objects.size() >= 15);
            CHECK(generated.state.receptacles.count("sinkbasin 1") == 1);
            CHECK(generated.state.receptacles.count("microwave 1") == 1);
            CHECK(generated.state.receptacles.count("fridge 1") == 1);
            bool has_lamp = false;
            for (const auto& [id, info] : generated.state.objects)
                if (info.lamp) has_lamp = true;
            CHECK(has_lamp);

            // Target object exists and never starts inside the target receptacle.
            auto targets = generated.state.receptacles.at(generated.task.target_receptacle);
            for (const std::string& id : targets.contents)
                CHECK(object_class(id) != generated.task.target_object_class);
            int placed = 0;
            for (const auto& [id, info] : generated.state.objects)
                if (object_class(id) == generated.task.target_object_class) ++placed;
            CHECK(placed == (type == TaskType::PickTwo ? 2 : 1));
        }
    }
}

TEST_CASE("goal text follows the task templates") {
    CHECK(make_session(TaskType::Clean, kLettuceSeed).task.goal_text ==
          "put some clean lettuce on the diningtable");
    GeneratedTask examine = generate_task(TaskType::Examine, 3);
    CHECK(examine.task.goal_text ==
          "examine the " + examine.task.target_object_class + " with the desklamp");
    GeneratedTask pick2 = generate_task(TaskType::PickTwo, 3);
    CHECK(pick2.task.goal_text.rfind("put two ", 0) == 0);
}

TEST_CASE("guard: the frozen lettuce seed keeps its layout") {
    EnvSession session = make_session(TaskType::Clean, kLettuceSeed);
    CHECK(session.task.target_object_class == "lettuce");
    CHECK(session.task.target_receptacle == "diningtable 1");
    bool on_countertop2 = false;
    for (const std::string& id : session.state.receptacles.at("countertop 2").contents)
        if (id == "lettuce 1") on_countertop2 = true;
    CHECK(on_countertop2);
}

TEST_CASE("initial observation lists receptacle classes with descending indices") {
    GeneratedTask generated = generate_task(TaskType::Pick, 1);
    std::string obs = generated.initial_observation;
    CHECK(obs.rfind("You are in the middle of a room. Looking quickly around you, you see ", 0) ==
          0);
    CHECK(obs.find("a cabinet 2, a cabinet 1") != std::string::npos);
    CHECK(obs.find("a countertop 3, a countertop 2, a countertop 1") != std::string::npos);
    CHECK(obs.find(", and a sinkbasin 1.") != std::string::npos);
}

TEST_CASE("observation templates match the household phrasing") {
    EnvSession session = make_session(TaskType::Clean, kLettuceSeed);

    SUBCASE("goto a surface lists contents alphabetically") {
        std::string obs = step_ok(session, "goto", {"countertop 2"});
        CHECK(obs.rfind("On the countertop 2, you see ", 0) == 0);
        CHECK(obs.find("a lettuce 1") != std::string::npos);
    }
    SUBCASE("closed and opened receptacles") {
        CHECK(step_ok(session, "goto", {"fridge 1"}) == "The fridge 1 is closed.");
        std::string obs = step_ok(session, "open", {"fridge 1"});
        CHECK(obs.rfind("You open the fridge 1. The fridge 1 is open. In it, you see ", 0) == 0);
        CHECK(step_ok(session, "close", {"fridge 1"}) == "You close the fridge 1.");
        CHECK(step_ok(session, "open", {"fridge 1"}).rfind("You open the fridge 1.", 0) == 0);
        CHECK(step_ok(session, "goto", {"countertop 1"}) != "Nothing happens.");
        std::string back = step_ok(session, "goto", {"fridge 1"});
        CHECK(back.rfind("The fridge 1 is open. In it, you see ", 0) == 0);
    }
    SUBCASE("take and put") {
        step_ok(session, "goto", {"countertop 2"});
        CHECK(step_ok(session, "take", {"lettuce 1", "countertop 2"}) ==
              "You pick up the lettuce 1 from the countertop 2.");
        step_ok(session, "goto", {"diningtable 1"});
        CHECK(step_ok(session, "put", {"lettuce 1", "diningtable 1"}) ==
              "You put the lettuce 1 in/on the diningtable 1.");
    }
    SUBCASE("clean heat cool use") {
        step_ok(session, "goto", {"countertop 2"});
        step_ok(session, "take", {"lettuce 1", "countertop 2"});
        step_ok(session, "goto", {"sinkbasin 1"});
        CHECK(step_ok(session, "clean", {"lettuce 1", "sinkbasin 1"}) ==
              "You clean the lettuce 1 using the sinkbasin 1.");
        step_ok(session, "goto", {"microwave 1"});
        CHECK(step_ok(session, "heat", {"lettuce 1", "microwave 1"}) ==
              "You heat the lettuce 1 using the microwave 1.");
        step_ok(session, "goto", {"fridge 1"});
        CHECK(step_ok(session, "cool", {"lettuce 1", "fridge 1"}) ==
              "You cool the lettuce 1 using the fridge 1.");
        GeneratedTask lamp_world = generate_task(TaskType::Examine, 3);
        EnvSession lamp_session;
        lamp_session.state = lamp_world.state;
        lamp_session.task = lamp_world.task;
        step_ok(lamp_session, "goto", {lamp_world.task.target_receptacle});
        CHECK(step_ok(lamp_session, "use", {"desklamp 1"}) == "You turn on the desklamp 1.");
    }
}

TEST_CASE("illegal actions observe Nothing happens and leave state intact") {
    EnvSession session = make_session(TaskType::Clean, kLettuceSeed);
    step_ok(session, "goto", {"countertop 2"});
    step_ok(session, "take", {"lettuce 1", "countertop 2"});
    HouseholdState before = session.state;

    // Cleaning while standing away from the sinkbasin must be a no-op.
    CHECK(step_ok(session, "clean", {"lettuce 1", "sinkbasin 1"}) == "Nothing happens.");
    CHECK(session.state == before);

    // Second take with full hands.
    CHECK(step_ok(session, "take", {"knife 1", "countertop 2"}) == "Nothing happens.");
    CHECK(session.state == before);

    // goto to the current location.
    CHECK(step_ok(session, "goto", {"countertop 2"}) == "Nothing happens.");
    // Unknown receptacle, closed-receptacle take, put of a non-held object.
    CHECK(step_ok(session, "goto", {"moon 7"}) == "Nothing happens.");
    CHECK(step_ok(session, "put", {"knife 1", "countertop 2"}) == "Nothing happens.");
    CHECK(session.state == before);

    // Steps were still counted and logged.
    CHECK(session.step_count == 7);
    CHECK(session.interaction_log.size() == 7);
    CHECK(session.interaction_log[2].first == "clean lettuce 1 with sinkbasin 1");
    CHECK(session.interaction_log[2].second == "Nothing happens.");
}

TEST_CASE("unknown actions are rejected without consuming a step") {
    EnvSession session = make_session(TaskType::Pick, 1);
    auto result = step(session, "fly_to", {"moon 7"});
    CHECK_FALSE(result.ok());
    CHECK(result.error().find("fly_to") != std::string::npos);
    auto arity = step(session, "take", {"knife 1"});
    CHECK_FALSE(arity.ok());
    CHECK(session.step_count == 0);
    CHECK(session.interaction_log.empty());
}

TEST_CASE("goal_met is false on untouched worlds for all six types") {
    for (TaskType type : {TaskType::Pick, TaskType::Clean, TaskType::Heat, TaskType::Cool,
                          TaskType::Examine, TaskType::PickTwo})
        for (unsigned seed : {0u, 3u, 11u}) {
            EnvSession session = make_session(type, seed);
            CHECK_FALSE(goal_met(session));
        }
}

TEST_CASE("oracle trajectories reach the goal for every task type") {
    for (TaskType type : {TaskType::Pick, TaskType::Clean, TaskType::Heat, TaskType::Cool,
                          TaskType::Examine, TaskType::PickTwo}) {
        for (unsigned seed : {0u, 3u, 9u, 27u}) {
            EnvSession session = make_session(type, seed);
            auto actions = testsupport::oracle_actions(session);
            for (const auto& [action, args] : actions) {
                std::string obs = step_ok(session, action, args);
                INFO(task_type_name(type), " seed ", seed, ": ", action, " -> ", obs);
                CHECK(obs != "Nothing happens.");
            }
            CHECK(goal_met(session));
            CHECK(testsupport::brute_force_goal(session));
            CHECK(session.step_count <= 50);
        }
    }
}

TEST_CASE("heating clears cold and flags persist otherwise") {
    EnvSession session = make_session(TaskType::Heat, 3);
    std::string target = session.task.target_object_class + " 1";
    auto actions = testsupport::oracle_actions(session);
    // Run up to (and including) the heat action.
    for (const auto& [action, args] : actions) {
        step_ok(session, action, args);
        if (action == "heat") break;
    }
    CHECK(session.state.objects.at(target).hot);
    step_ok(session, "goto", {"fridge 1"});
    step_ok(session, "open", {"fridge 1"});
    step_ok(session, "cool", {target, "fridge 1"});
    CHECK_FALSE(session.state.objects.at(target).hot);
    CHECK(session.state.objects.at(target).cold);
    step_ok(session, "goto", {"microwave 1"});
    CHECK(step_ok(session, "heat", {target, "microwave 1"}) ==
          "You heat the " + target + " using the microwave 1.");
    CHECK_FALSE(session.state.objects.at(target).cold);

    // Re-heating an already-hot object changes nothing.
    CHECK(step_ok(session, "heat", {target, "microwave 1"}) == "Nothing happens.");
}

TEST_CASE("introspection reports location, held object, and a three-entry tail") {
    EnvSession session = make_session(TaskType::Clean, kLettuceSeed);
    Introspection empty = introspect(session);
    CHECK(empty.agent_location == "start");
    CHECK_FALSE(empty.held.has_value());
    CHECK(empty.last_interactions.empty());

    step_ok(session, "goto", {"countertop 2"});
    step_ok(session, "take", {"lettuce 1", "countertop 2"});
    step_ok(session, "clean", {"lettuce 1", "sinkbasin 1"});
    step_ok(session, "goto", {"sinkbasin 1"});
    Introspection view = introspect(session);
    CHECK(view.agent_location == "sinkbasin 1");
    CHECK(view.held == "lettuce 1");
    REQUIRE(view.last_interactions.size() == 3);
    CHECK(view.last_interactions[0].first == "take lettuce 1 from countertop 2");
    CHECK(view.last_interactions[1].second == "Nothing happens.");
    CHECK(view.last_interactions[2].first == "go to sinkbasin 1");
}

namespace {

testsupport::ActionStep random_action(std::mt19937& rng, const EnvSession& session) {
    auto draw = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    std::vector<std::string> receps = receptacle_ids(session.state);
    std::vector<std::string> objects;
    for (const auto& [id, info] : session.state.objects) objects.push_back(id);

    const std::string here = session.state.agent_location;
    std::string visible;
    if (auto it = session.state.receptacles.find(here);
        it != session.state.receptacles.end() && !it->second.contents.empty())
        visible = it->second.contents[draw(it->second.contents.size())];

    switch (draw(12)) {
    case 0: return {"goto", {receps[draw(receps.size())]}};
    case 1: return {"goto", {here}};
    case 2:
        if (!visible.empty()) return {"take", {visible, here}};
        return {"take", {objects[draw(objects.size())], here}};
    case 3: return {"take", {objects[draw(objects.size())], receps[draw(receps.size())]}};
    case 4:
        if (session.state.held) return {"put", {*session.state.held, here}};
        return {"put", {objects[draw(objects.size())], receps[draw(receps.size())]}};
    case 5: return {"open", {here}};
    case 6: return {"close", {here}};
    case 7:
        if (session.state.held) return {"clean", {*session.state.held, here}};
        return {"clean", {objects[draw(objects.size())], "sinkbasin 1"}};
    case 8:
        if (session.state.held) return {"heat", {*session.state.held, "microwave 1"}};
        return {"heat", {objects[draw(objects.size())], receps[draw(receps.size())]}};
    case 9:
        if (session.state.held) return {"cool", {*session.state.held, here}};
        return {"cool", {objects[draw(objects.size())], "fridge 1"}};
    case 10: return {"use", {"desklamp 1"}};
    default: return {"goto", {"moon " + std::to_string(draw(9))}};
    }
}

} // namespace

TEST_CASE("property: Nothing happens iff the state is unchanged") {
    std::mt19937 rng(4242);
    TaskType types[] = {TaskType::Pick, TaskType::Clean, TaskType::Heat,
                        TaskType::Cool, TaskType::Examine, TaskType::PickTwo};
    for (int episode = 0; episode < 60; ++episode) {
        EnvSession session = make_session(types[episode % 6], static_cast<unsigned>(episode));
        std::map<std::string, std::string> all_objects_before;
        for (const auto& [id, info] : session.state.objects) all_objects_before[id] = "";

        for (int t = 0; t < 40; ++t) {
            auto [action, args] = random_action(rng, session);
            HouseholdState before = session.state;
            auto result = step(session, action, args);
            REQUIRE(result.ok());

            bool unchanged = session.state == before;
            bool nothing = result.value() == "Nothing happens.";
            INFO("episode ", episode, " step ", t, ": ", action, " ",
                 args.empty() ? "" : args[0], " -> ", result.value());
            CHECK(nothing == unchanged);

            // goal_met agrees with the brute-force oracle on every step.
            CHECK(goal_met(session) == testsupport::brute_force_goal(session));

            // Flag persistence.
            for (const auto& [id, info] : before.objects) {
                const ObjectInfo& now = session.state.objects.at(id);
                if (info.clean) CHECK(now.clean);
                if (info.hot && !now.hot) CHECK(now.cold);
                if (info.cold && !now.cold) CHECK(now.hot);
                if (info.used) CHECK(now.used);
            }

            // Conservation: objects never appear or vanish.
            std::size_t placed = session.state.held ? 1 : 0;
            for (const auto& [id, recep] : session.state.receptacles)
                placed += recep.contents.size();
            CHECK(placed == all_objects_before.size());
        }
    }
}
