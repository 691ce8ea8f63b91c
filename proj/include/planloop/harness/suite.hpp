#pragma once

#include "planloop/controller/controller.hpp"
#include "planloop/llm/remote.hpp"
#include "planloop/skills/memory.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace planloop::harness {

struct TaskSpec {
    env::TaskType type = env::TaskType::Pick;
    unsigned seed = 0;

    bool operator==(const TaskSpec&) const = default;
};

struct ScriptedBackendConfig {
    std::string fixtures_dir; // per-episode subdirectories, see fixture_dir_for
    bool strict = true;
};

struct SuiteConfig {
    std::vector<TaskSpec> tasks;
    std::vector<controller::LoopMode> modes = {controller::LoopMode::Explicit};
    int max_refinement_rounds = 4;
    int max_repair_attempts = 2;
    int action_cap = 50;
    std::optional<ScriptedBackendConfig> scripted;
    std::optional<llm::RemoteConfig> remote;
    int skill_rounds = 0;              // discovery rounds before the measured run
    std::vector<TaskSpec> skill_eval_tasks;
    std::string skill_store;           // JSON store path; loaded when present
    std::string samples_dir;           // sample_<type>.plan expert exemplars
    std::string prompts_dir = "prompts";
    std::string out_dir = "out";
    unsigned seed = 0;
    int workers = 4;
};

// Parses the JSON config; relative paths resolve against the file's directory.
Result<SuiteConfig> load_suite_config(const std::string& path);

struct EpisodeKey {
    controller::LoopMode mode = controller::LoopMode::Explicit;
    env::TaskType type = env::TaskType::Pick;
    unsigned seed = 0;
};

// "explicit/Clean-2521": the sort key for every per-episode artifact.
std::string episode_id(const EpisodeKey& key);

// "<root>/<mode>/<Type>-<seed>" when that directory exists, else the shared
// "<root>/<Type>-<seed>".
std::string fixture_dir_for(const std::string& root, const EpisodeKey& key);

struct EpisodeRow {
    EpisodeKey key;
    std::string id;
    controller::EpisodeRecord record;
    std::vector<llm::TranscriptRecord> transcript;
    std::string error; // harness-level failure (fixture load, bad backend)
    bool success = false;
};

struct EpisodeSummary {
    controller::LoopMode mode = controller::LoopMode::Explicit;
    env::TaskType type = env::TaskType::Pick;
    unsigned seed = 0;
    std::string id;
    bool success = false;
    bool plan_generation_failed = false;
    std::string outcome;
    int refinement_rounds = 0;
    int llm_calls = 0;
    int env_actions = 0;
};

EpisodeSummary summarize(const EpisodeRow& row);

struct ModeAggregates {
    int total = 0;
    int successes = 0;
    std::map<env::TaskType, std::pair<int, int>> per_type; // successes, total
    double mean_llm_calls = 0.0;
    double mean_env_actions = 0.0;
    double mean_refinement_rounds = 0.0;
    // successes under round budget b, for b = 0..max_refinement_rounds; an
    // episode that succeeded after r rounds counts toward every budget >= r.
    std::vector<int> round_curve;
};

std::map<controller::LoopMode, ModeAggregates>
aggregate(const std::vector<EpisodeSummary>& episodes, int max_round_budget);

struct SuiteResult {
    std::vector<EpisodeRow> episodes;      // sorted by id
    std::vector<EpisodeSummary> summaries; // same order
    std::map<controller::LoopMode, ModeAggregates> aggregates;
    int max_round_budget = 0;
};

// Supplies each episode's backend; the transcript pointer may be ignored by
// backends that do not log. When empty, the config's scripted/remote backend
// is used.
using BackendFactory =
    std::function<std::unique_ptr<llm::Backend>(const EpisodeKey&, llm::LlmTranscript*)>;

// Runs the manifest across all configured modes (after any skill-discovery
// rounds), writes traces.jsonl, transcripts.jsonl, results.{json,csv,txt}
// into out_dir, and returns the aggregated result. Config errors fail before
// any episode runs; per-episode failures are recorded in their rows.
Result<SuiteResult> run_suite(const SuiteConfig& config, const llm::TemplateEngine& engine,
                              BackendFactory factory = {});

// Success-rate table: one row per mode, one column per task type plus "All";
// percentages with two decimals, "—" where a type has no tasks. The text
// format appends mean-cost and round-curve blocks.
std::string render_table_csv(const SuiteResult& result);
std::string render_table_text(const SuiteResult& result);

// results.json contents (episode summaries + budget); used by `report`.
Result<SuiteResult> load_result(const std::string& path);

// Human-readable rendering of one traced episode; `check` instead verifies
// the trace's internal consistency (action counts, round counts, flags).
Result<std::string> replay_trace(const std::string& traces_path, const std::string& id,
                                 bool check);

// Exemplar resolution: archived skill for the task's signature, else the
// sample_<type>.plan file under samples_dir, else empty (zero-shot).
std::string exemplar_for(const skills::SkillStore& store, const env::TaskInstance& task,
                         const std::string& samples_dir);

} // namespace planloop::harness
