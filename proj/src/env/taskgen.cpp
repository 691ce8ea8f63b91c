#include "planloop/env/household.hpp"

#include <random>

namespace planloop::env {

namespace {

const char* kFloorplan[] = {
    "cabinet 1",  "cabinet 2",  "countertop 1", "countertop 2", "countertop 3", "desk 1",
    "diningtable 1", "drawer 1", "drawer 2",    "fridge 1",     "garbagecan 1", "microwave 1",
    "safe 1",     "shelf 1",    "shelf 2",      "sidetable 1",  "sinkbasin 1",
};

const char* kOpenable[] = {"cabinet 1", "cabinet 2", "drawer 1", "drawer 2", "fridge 1", "safe 1"};

const char* kFillerClasses[] = {"knife", "saltshaker", "soapbottle", "bread", "butterknife",
                                "mug",   "cellphone",  "keychain",   "watch", "apple",
                                "cup",   "plate",      "spatula",    "fork",  "book",
                                "vase",  "pen",        "creditcard", "bowl",  "pan"};

std::vector<std::string> target_class_pool(TaskType type) {
    switch (type) {
    case TaskType::Pick: return {"vase", "watch", "cellphone", "book", "mug"};
    case TaskType::Clean: return {"lettuce", "apple", "tomato", "cup", "plate", "potato"};
    case TaskType::Heat: return {"bread", "apple", "tomato", "potato", "egg"};
    case TaskType::Cool: return {"lettuce", "apple", "tomato", "potato", "bread"};
    case TaskType::Examine: return {"book", "cellphone", "watch", "creditcard", "pen"};
    case TaskType::PickTwo: return {"saltshaker", "soapbottle", "book", "watch", "cup"};
    }
    return {};
}

std::vector<std::string> target_recep_pool(TaskType type) {
    switch (type) {
    case TaskType::Pick:
        return {"shelf 1", "shelf 2", "sidetable 1", "safe 1", "drawer 1", "cabinet 1"};
    case TaskType::Clean:
        return {"diningtable 1", "countertop 1", "countertop 2",
                "countertop 3",  "shelf 1",      "sidetable 1"};
    case TaskType::Heat: return {"diningtable 1", "countertop 1", "countertop 2", "countertop 3"};
    case TaskType::Cool:
        return {"diningtable 1", "countertop 1", "countertop 2", "countertop 3", "shelf 2"};
    case TaskType::PickTwo:
        return {"diningtable 1", "shelf 1", "sidetable 1", "cabinet 2", "drawer 2"};
    case TaskType::Examine: return {}; // the desklamp receptacle is the target
    }
    return {};
}

// Surfaces take "on", containers take "in".
const char* preposition(const std::string& recep_class) {
    for (const char* surface : {"countertop", "diningtable", "shelf", "sidetable", "desk"})
        if (recep_class == surface) return "on";
    return "in";
}

std::string make_goal_text(TaskType type, const std::string& cls, const std::string& recep) {
    std::string recep_class = object_class(recep);
    std::string prep = preposition(recep_class);
    switch (type) {
    case TaskType::Pick: return "put some " + cls + " " + prep + " the " + recep_class;
    case TaskType::Clean: return "put some clean " + cls + " " + prep + " the " + recep_class;
    case TaskType::Heat: return "put some hot " + cls + " " + prep + " the " + recep_class;
    case TaskType::Cool: return "put some cool " + cls + " " + prep + " the " + recep_class;
    case TaskType::PickTwo: return "put two " + cls + " " + prep + " the " + recep_class;
    case TaskType::Examine: return "examine the " + cls + " with the desklamp";
    }
    return "";
}

} // namespace

GeneratedTask generate_task(TaskType type, unsigned seed) {
    std::mt19937 rng(seed * 6u + static_cast<unsigned>(type));
    auto draw = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

    HouseholdState state;
    for (const char* id : kFloorplan) {
        Receptacle recep;
        for (const char* openable : kOpenable)
            if (std::string(id) == openable) recep.openable = true;
        state.receptacles[id] = recep;
    }

    auto place = [&state](const std::string& id, const std::string& recep, ObjectInfo info = {}) {
        state.receptacles.at(recep).contents.push_back(id);
        state.objects[id] = info;
    };

    const std::vector<std::string> classes = target_class_pool(type);
    const std::string target_class = classes[draw(classes.size())];

    const std::string lamp_recep = draw(2) == 0 ? "desk 1" : "sidetable 1";
    std::string target_recep = lamp_recep;
    if (type != TaskType::Examine) {
        const std::vector<std::string> receps = target_recep_pool(type);
        target_recep = receps[draw(receps.size())];
    }

    ObjectInfo lamp;
    lamp.lamp = true;
    place("desklamp 1", lamp_recep, lamp);

    std::vector<std::string> filler_classes;
    for (const char* cls : kFillerClasses)
        if (cls != target_class) filler_classes.push_back(cls);

    std::map<std::string, int> next_index;
    for (int i = 0; i < 16; ++i) {
        const std::string cls = filler_classes[draw(filler_classes.size())];
        const std::string id = cls + " " + std::to_string(++next_index[cls]);
        place(id, kFloorplan[draw(std::size(kFloorplan))]);
    }

    std::vector<std::string> candidates;
    for (const char* id : kFloorplan)
        if (id != target_recep) candidates.push_back(id);
    place(target_class + " 1", candidates[draw(candidates.size())]);
    if (type == TaskType::PickTwo) place(target_class + " 2", candidates[draw(candidates.size())]);

    TaskInstance task;
    task.task_type = type;
    task.target_object_class = target_class;
    task.target_receptacle = target_recep;
    task.seed = seed;
    task.goal_text = make_goal_text(type, target_class, target_recep);

    return {task, state, initial_observation(state)};
}

EnvSession make_session(TaskType type, unsigned seed) {
    GeneratedTask generated = generate_task(type, seed);
    EnvSession session;
    session.state = std::move(generated.state);
    session.task = std::move(generated.task);
    session.initial_observation = std::move(generated.initial_observation);
    return session;
}

} // namespace planloop::env
