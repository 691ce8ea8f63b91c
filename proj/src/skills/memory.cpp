#include "planloop/skills/memory.hpp"

#include "planloop/plan/print.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace planloop::skills {

namespace {

using nlohmann::json;

json to_json(const SkillRecord& record) {
    return json{{"signature", record.signature},
                {"task_type", env::task_type_name(record.task_type)},
                {"solution", record.solution},
                {"episode_id", record.episode_id},
                {"seed", record.seed},
                {"env_actions", record.env_actions},
                {"eval",
                 {{"rate_without", record.eval.rate_without},
                  {"rate_with", record.eval.rate_with},
                  {"task_seeds", record.eval.task_seeds}}},
                {"status", skill_status_name(record.status)}};
}

Result<SkillRecord> record_from_json(const json& node) {
    using R = Result<SkillRecord>;
    if (!node.is_object()) return R::failure("not an object");
    SkillRecord record;
    try {
        record.signature = node.at("signature").get<std::string>();
        auto type = env::task_type_from_name(node.at("task_type").get<std::string>());
        if (!type) return R::failure("unknown task_type");
        record.task_type = *type;
        record.solution = node.at("solution").get<std::string>();
        record.episode_id = node.at("episode_id").get<std::string>();
        record.seed = node.at("seed").get<unsigned>();
        record.env_actions = node.at("env_actions").get<int>();
        const json& eval = node.at("eval");
        record.eval.rate_without = eval.at("rate_without").get<double>();
        record.eval.rate_with = eval.at("rate_with").get<double>();
        record.eval.task_seeds = eval.at("task_seeds").get<std::vector<unsigned>>();
        auto status = skill_status_from_name(node.at("status").get<std::string>());
        if (!status) return R::failure("unknown status");
        record.status = *status;
    } catch (const json::exception& failure) {
        return R::failure(failure.what());
    }

    // The status invariants are assertable from the record alone; a file that
    // breaks them is corrupt, not merely stale.
    const bool improved = record.eval.rate_with > record.eval.rate_without;
    if (record.status == SkillStatus::Archived && !improved)
        return R::failure("archived without a success-rate improvement");
    if (record.status == SkillStatus::Discarded && improved)
        return R::failure("discarded despite a success-rate improvement");
    return record;
}

} // namespace

const char* skill_status_name(SkillStatus status) {
    switch (status) {
    case SkillStatus::Candidate: return "candidate";
    case SkillStatus::Archived: return "archived";
    case SkillStatus::Discarded: return "discarded";
    }
    return "candidate";
}

std::optional<SkillStatus> skill_status_from_name(const std::string& name) {
    for (SkillStatus status :
         {SkillStatus::Candidate, SkillStatus::Archived, SkillStatus::Discarded})
        if (name == skill_status_name(status)) return status;
    return std::nullopt;
}

std::string skill_signature(env::TaskType type) {
    return std::string(env::task_type_name(type)) + "(any, any)";
}

std::string skill_signature(const env::TaskInstance& task) {
    return skill_signature(task.task_type);
}

void add_record(SkillStore& store, SkillRecord record) {
    if (record.status == SkillStatus::Archived) {
        std::erase_if(store.records, [&](const SkillRecord& existing) {
            return existing.status == SkillStatus::Archived &&
                   existing.signature == record.signature;
        });
    }
    store.records.push_back(std::move(record));
}

std::vector<SkillRecord> acquire(const std::vector<controller::EpisodeRecord>& episodes) {
    std::map<std::string, SkillRecord> by_signature;
    std::vector<std::string> order;
    for (const controller::EpisodeRecord& episode : episodes) {
        if (!episode.success() || episode.plans.empty()) continue;
        SkillRecord candidate;
        candidate.signature = skill_signature(episode.task);
        candidate.task_type = episode.task.task_type;
        candidate.solution = plan::render_plan(episode.plans.back());
        candidate.episode_id = std::string(env::task_type_name(episode.task.task_type)) + "-" +
                               std::to_string(episode.task.seed);
        candidate.seed = episode.task.seed;
        candidate.env_actions = episode.env_actions;

        auto [slot, inserted] = by_signature.try_emplace(candidate.signature, candidate);
        if (inserted)
            order.push_back(candidate.signature);
        else if (candidate.env_actions < slot->second.env_actions)
            slot->second = candidate;
    }

    std::vector<SkillRecord> candidates;
    for (const std::string& signature : order) candidates.push_back(by_signature.at(signature));
    return candidates;
}

Result<SkillRecord> filter_skill(SkillRecord candidate, const std::vector<EvalTask>& eval_tasks,
                                 const std::string& baseline_exemplar, const EvalRunner& runner) {
    using R = Result<SkillRecord>;
    if (eval_tasks.empty()) return R::failure("filter requires at least one eval task");
    for (const EvalTask& task : eval_tasks) {
        if (skill_signature(task.type) != candidate.signature)
            return R::failure("eval task signature does not match the candidate");
        if (task.seed == candidate.seed)
            return R::failure("eval seeds must be disjoint from the candidate's provenance");
    }

    auto run_suite = [&](const std::string& exemplar) {
        int successes = 0;
        for (const EvalTask& task : eval_tasks)
            if (runner(task, exemplar)) ++successes;
        return static_cast<double>(successes) / static_cast<double>(eval_tasks.size());
    };

    candidate.eval.rate_without = run_suite(baseline_exemplar);
    candidate.eval.rate_with = run_suite(candidate.solution);
    candidate.eval.task_seeds.clear();
    for (const EvalTask& task : eval_tasks) candidate.eval.task_seeds.push_back(task.seed);
    candidate.status = candidate.eval.rate_with > candidate.eval.rate_without
                           ? SkillStatus::Archived
                           : SkillStatus::Discarded;
    return candidate;
}

Result<SkillRecord> filter_skill(SkillRecord candidate, const std::vector<EvalTask>& eval_tasks,
                                 const controller::ControllerConfig& config,
                                 const llm::TemplateEngine& engine, llm::Backend& backend) {
    EvalRunner runner = [&](const EvalTask& task, const std::string& exemplar) {
        env::EnvSession session = env::make_session(task.type, task.seed);
        controller::ControllerConfig round = config;
        round.exemplar = exemplar;
        return controller::run_episode(round, session, engine, backend).success();
    };
    return filter_skill(std::move(candidate), eval_tasks, config.exemplar, runner);
}

std::vector<std::string> retrieve(const SkillStore& store, const env::TaskInstance& task,
                                  const std::string& expert_sample) {
    const std::string signature = skill_signature(task);
    for (const SkillRecord& record : store.records)
        if (record.status == SkillStatus::Archived && record.signature == signature)
            return {record.solution};
    if (!expert_sample.empty()) return {expert_sample};
    return {};
}

Result<bool> persist(const SkillStore& store, const std::string& path) {
    json doc;
    doc["records"] = json::array();
    for (const SkillRecord& record : store.records) doc["records"].push_back(to_json(record));

    std::ofstream out(path);
    if (!out) return Result<bool>::failure("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
    return out.good() ? Result<bool>(true)
                      : Result<bool>::failure("write to " + path + " failed");
}

Result<SkillStore> load_store(const std::string& path) {
    using R = Result<SkillStore>;
    std::ifstream in(path);
    if (!in) return R::failure("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    json doc = json::parse(buffer.str(), nullptr, false);
    if (doc.is_discarded()) return R::failure("corrupt skill store: " + path + " is not valid JSON");
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
        return R::failure("corrupt skill store: missing records array");

    SkillStore store;
    const json& records = doc["records"];
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto record = record_from_json(records[i]);
        if (!record.ok())
            return R::failure("corrupt skill store: record " + std::to_string(i) + ": " +
                              record.error());
        store.records.push_back(record.value());
    }
    return store;
}

} // namespace planloop::skills
