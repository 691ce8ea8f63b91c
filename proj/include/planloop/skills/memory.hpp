#pragma once

#include "planloop/controller/controller.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace planloop::skills {

enum class SkillStatus { Candidate, Archived, Discarded };

const char* skill_status_name(SkillStatus status);
std::optional<SkillStatus> skill_status_from_name(const std::string& name);

// Tasks of the same type share a signature regardless of which object or
// receptacle the generator picked: "Clean(any, any)".
std::string skill_signature(env::TaskType type);
std::string skill_signature(const env::TaskInstance& task);

struct SkillEval {
    double rate_without = 0.0;
    double rate_with = 0.0;
    std::vector<unsigned> task_seeds;

    bool operator==(const SkillEval&) const = default;
};

struct SkillRecord {
    std::string signature;
    env::TaskType task_type = env::TaskType::Pick;
    std::string solution; // rendered plan text, the latest successful revision
    std::string episode_id;
    unsigned seed = 0;      // the seed the solution was discovered on
    int env_actions = 0;    // acquisition tie-break
    SkillEval eval;
    SkillStatus status = SkillStatus::Candidate;

    bool operator==(const SkillRecord&) const = default;
};

struct SkillStore {
    std::vector<SkillRecord> records;

    bool operator==(const SkillStore&) const = default;
};

// Insert preserving the store invariant: at most one archived record per
// signature, newest wins.
void add_record(SkillStore& store, SkillRecord record);

// Candidate skills from the successful episodes: the final (post-refinement)
// plan per signature, keeping the cheapest when signatures collide.
std::vector<SkillRecord> acquire(const std::vector<controller::EpisodeRecord>& episodes);

struct EvalTask {
    env::TaskType type = env::TaskType::Pick;
    unsigned seed = 0;
};

// Runs the eval tasks twice with identical seeds and config — once with the
// candidate as exemplar, once without — and archives only on a strict
// success-rate improvement.
Result<SkillRecord> filter_skill(SkillRecord candidate, const std::vector<EvalTask>& eval_tasks,
                                 const controller::ControllerConfig& config,
                                 const llm::TemplateEngine& engine, llm::Backend& backend);

// Same protocol with the episode execution abstracted away: the runner gets
// one eval task plus the exemplar for that pass and reports success. Lets
// callers supply per-episode backends.
using EvalRunner = std::function<bool(const EvalTask& task, const std::string& exemplar)>;

Result<SkillRecord> filter_skill(SkillRecord candidate, const std::vector<EvalTask>& eval_tasks,
                                 const std::string& baseline_exemplar, const EvalRunner& runner);

// The archived solution matching the task's signature, else the configured
// expert sample, else nothing (the controller proceeds zero-shot).
std::vector<std::string> retrieve(const SkillStore& store, const env::TaskInstance& task,
                                  const std::string& expert_sample = "");

Result<bool> persist(const SkillStore& store, const std::string& path);
Result<SkillStore> load_store(const std::string& path);

} // namespace planloop::skills
