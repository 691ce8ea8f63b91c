#include "planloop/harness/suite.hpp"

#include "planloop/plan/print.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace planloop::harness {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr env::TaskType kTypeOrder[] = {env::TaskType::Pick,    env::TaskType::Clean,
                                        env::TaskType::Heat,    env::TaskType::Cool,
                                        env::TaskType::Examine, env::TaskType::PickTwo};

std::string iso_timestamp_utc() {
    std::time_t now = std::time(nullptr);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buffer;
}

std::string two_decimals(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", value);
    return buffer;
}

std::string percent_cell(int successes, int total) {
    if (total == 0) return "—";
    return two_decimals(100.0 * static_cast<double>(successes) / static_cast<double>(total));
}

std::string pad_left(const std::string& text, std::size_t width) {
    // The em dash is three bytes but one column.
    std::size_t columns = text == "—" ? 1 : text.size();
    if (columns >= width) return text;
    return std::string(width - columns, ' ') + text;
}

std::string resolve_path(const fs::path& base, const std::string& value) {
    if (value.empty()) return value;
    fs::path p(value);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (base / p).lexically_normal().string();
}

Result<std::vector<TaskSpec>> parse_tasks(const json& node, const char* field) {
    using R = Result<std::vector<TaskSpec>>;
    std::vector<TaskSpec> tasks;
    if (!node.is_array()) return R::failure(std::string("config error: ") + field + " must be an array");
    for (const json& entry : node) {
        auto type = env::task_type_from_name(entry.at("type").get<std::string>());
        if (!type)
            return R::failure(std::string("config error: unknown task type in ") + field + ": " +
                              entry.at("type").get<std::string>());
        tasks.push_back({*type, entry.at("seed").get<unsigned>()});
    }
    return tasks;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Result<bool> write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) return Result<bool>::failure("cannot open " + path + " for writing");
    out << content;
    return out.good() ? Result<bool>(true) : Result<bool>::failure("write to " + path + " failed");
}

json episode_trace_json(const EpisodeRow& row) {
    const controller::EpisodeRecord& record = row.record;
    json plans = json::array();
    for (const plan::PlanAst& ast : record.plans) plans.push_back(plan::render_plan(ast));
    json rounds = json::array();
    for (const interp::EpisodeContext& context : record.round_contexts) {
        json interactions = json::array();
        for (const auto& [command, observation] : context.interactions)
            interactions.push_back(json::array({command, observation}));
        rounds.push_back(interactions);
    }
    return json{{"kind", "episode"},
                {"id", row.id},
                {"mode", controller::loop_mode_name(row.key.mode)},
                {"task_type", env::task_type_name(row.key.type)},
                {"seed", row.key.seed},
                {"goal", record.task.goal_text},
                {"success", row.success},
                {"outcome", summarize(row).outcome},
                {"plan_generation_failed", record.plan_generation_failed},
                {"failure_detail", record.failure_detail},
                {"error", row.error},
                {"refinement_rounds", record.refinement_rounds},
                {"llm_calls", record.llm_calls},
                {"env_actions", record.env_actions},
                {"start_froms", record.start_froms},
                {"plans", plans},
                {"initial_observation",
                 record.round_contexts.empty() ? ""
                                               : record.round_contexts.front().initial_observation},
                {"rounds", rounds},
                {"report", record.last_report ? record.last_report->to_text() : ""}};
}

json transcript_trace_json(const EpisodeRow& row) {
    json records = json::array();
    for (const llm::TranscriptRecord& record : row.transcript)
        records.push_back(json{{"kind", llm::prompt_kind_name(record.kind)},
                               {"prompt", record.prompt},
                               {"response", record.response},
                               {"prompt_tokens", record.prompt_tokens},
                               {"completion_tokens", record.completion_tokens},
                               {"ok", record.ok},
                               {"attempt", record.attempt}});
    return json{{"kind", "transcript"}, {"id", row.id}, {"records", records}};
}

json summary_json(const EpisodeSummary& summary) {
    return json{{"mode", controller::loop_mode_name(summary.mode)},
                {"task_type", env::task_type_name(summary.type)},
                {"seed", summary.seed},
                {"id", summary.id},
                {"success", summary.success},
                {"plan_generation_failed", summary.plan_generation_failed},
                {"outcome", summary.outcome},
                {"refinement_rounds", summary.refinement_rounds},
                {"llm_calls", summary.llm_calls},
                {"env_actions", summary.env_actions}};
}

Result<EpisodeSummary> summary_from_json(const json& node) {
    using R = Result<EpisodeSummary>;
    EpisodeSummary summary;
    try {
        auto mode = controller::loop_mode_from_name(node.at("mode").get<std::string>());
        auto type = env::task_type_from_name(node.at("task_type").get<std::string>());
        if (!mode || !type) return R::failure("unknown mode or task type");
        summary.mode = *mode;
        summary.type = *type;
        summary.seed = node.at("seed").get<unsigned>();
        summary.id = node.at("id").get<std::string>();
        summary.success = node.at("success").get<bool>();
        summary.plan_generation_failed = node.at("plan_generation_failed").get<bool>();
        summary.outcome = node.at("outcome").get<std::string>();
        summary.refinement_rounds = node.at("refinement_rounds").get<int>();
        summary.llm_calls = node.at("llm_calls").get<int>();
        summary.env_actions = node.at("env_actions").get<int>();
    } catch (const json::exception& failure) {
        return R::failure(failure.what());
    }
    return summary;
}

} // namespace

std::string episode_id(const EpisodeKey& key) {
    return std::string(controller::loop_mode_name(key.mode)) + "/" +
           env::task_type_name(key.type) + "-" + std::to_string(key.seed);
}

std::string fixture_dir_for(const std::string& root, const EpisodeKey& key) {
    const std::string leaf =
        std::string(env::task_type_name(key.type)) + "-" + std::to_string(key.seed);
    fs::path per_mode = fs::path(root) / controller::loop_mode_name(key.mode) / leaf;
    if (fs::is_directory(per_mode)) return per_mode.string();
    return (fs::path(root) / leaf).string();
}

Result<SuiteConfig> load_suite_config(const std::string& path) {
    using R = Result<SuiteConfig>;
    std::ifstream in(path);
    if (!in) return R::failure("cannot open config " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) return R::failure("config " + path + " is not valid JSON");
    if (!doc.is_object()) return R::failure("config " + path + " must be a JSON object");

    const fs::path base = fs::absolute(fs::path(path)).parent_path();
    SuiteConfig config;
    try {
        auto tasks = parse_tasks(doc.at("tasks"), "tasks");
        if (!tasks.ok()) return R::failure(tasks.error());
        config.tasks = tasks.value();

        if (doc.contains("modes")) {
            config.modes.clear();
            for (const json& name : doc.at("modes")) {
                auto mode = controller::loop_mode_from_name(name.get<std::string>());
                if (!mode)
                    return R::failure("config error: unknown mode " + name.get<std::string>());
                config.modes.push_back(*mode);
            }
        }
        config.max_refinement_rounds =
            doc.value("max_refinement_rounds", config.max_refinement_rounds);
        config.max_repair_attempts = doc.value("max_repair_attempts", config.max_repair_attempts);
        config.action_cap = doc.value("action_cap", config.action_cap);
        config.skill_rounds = doc.value("skill_rounds", config.skill_rounds);
        if (doc.contains("skill_eval_tasks")) {
            auto eval = parse_tasks(doc.at("skill_eval_tasks"), "skill_eval_tasks");
            if (!eval.ok()) return R::failure(eval.error());
            config.skill_eval_tasks = eval.value();
        }
        config.skill_store = resolve_path(base, doc.value("skill_store", std::string()));
        config.samples_dir = resolve_path(base, doc.value("samples_dir", std::string()));
        config.prompts_dir = resolve_path(base, doc.value("prompts_dir", config.prompts_dir));
        config.out_dir = resolve_path(base, doc.value("out_dir", config.out_dir));
        config.seed = doc.value("seed", config.seed);
        config.workers = doc.value("workers", config.workers);

        if (doc.contains("backend")) {
            const json& backend = doc.at("backend");
            const std::string kind = backend.at("kind").get<std::string>();
            if (kind == "scripted") {
                ScriptedBackendConfig scripted;
                scripted.fixtures_dir =
                    resolve_path(base, backend.at("fixtures").get<std::string>());
                scripted.strict = backend.value("strict", true);
                config.scripted = scripted;
            } else if (kind == "remote") {
                llm::RemoteConfig remote;
                remote.base_url = backend.at("base_url").get<std::string>();
                remote.path = backend.value("path", remote.path);
                remote.model = backend.value("model", remote.model);
                remote.api_key_env = backend.value("api_key_env", remote.api_key_env);
                remote.timeout_ms = backend.value("timeout_ms", remote.timeout_ms);
                remote.max_retries = backend.value("max_retries", remote.max_retries);
                config.remote = remote;
            } else {
                return R::failure("config error: unknown backend kind " + kind);
            }
        }
    } catch (const json::exception& failure) {
        return R::failure(std::string("config error: ") + failure.what());
    }
    return config;
}

EpisodeSummary summarize(const EpisodeRow& row) {
    EpisodeSummary summary;
    summary.mode = row.key.mode;
    summary.type = row.key.type;
    summary.seed = row.key.seed;
    summary.id = row.id;
    summary.success = row.success;
    summary.plan_generation_failed = row.record.plan_generation_failed;
    if (!row.error.empty())
        summary.outcome = "error";
    else if (row.record.plan_generation_failed)
        summary.outcome = "plan_generation_failed";
    else
        summary.outcome = interp::outcome_status_name(row.record.outcome);
    summary.refinement_rounds = row.record.refinement_rounds;
    summary.llm_calls = row.record.llm_calls;
    summary.env_actions = row.record.env_actions;
    return summary;
}

std::map<controller::LoopMode, ModeAggregates>
aggregate(const std::vector<EpisodeSummary>& episodes, int max_round_budget) {
    std::map<controller::LoopMode, ModeAggregates> aggregates;
    for (const EpisodeSummary& episode : episodes) {
        ModeAggregates& agg = aggregates[episode.mode];
        if (agg.round_curve.empty()) agg.round_curve.assign(max_round_budget + 1, 0);
        ++agg.total;
        auto& [type_successes, type_total] = agg.per_type[episode.type];
        ++type_total;
        if (episode.success) {
            ++agg.successes;
            ++type_successes;
            for (int budget = episode.refinement_rounds; budget <= max_round_budget; ++budget)
                ++agg.round_curve[budget];
        }
        agg.mean_llm_calls += episode.llm_calls;
        agg.mean_env_actions += episode.env_actions;
        agg.mean_refinement_rounds += episode.refinement_rounds;
    }
    for (auto& [mode, agg] : aggregates) {
        agg.mean_llm_calls /= agg.total;
        agg.mean_env_actions /= agg.total;
        agg.mean_refinement_rounds /= agg.total;
    }
    return aggregates;
}

std::string exemplar_for(const skills::SkillStore& store, const env::TaskInstance& task,
                         const std::string& samples_dir) {
    std::vector<std::string> exemplars = skills::retrieve(store, task);
    if (!exemplars.empty()) return exemplars.front();
    if (samples_dir.empty()) return {};
    std::string lowered;
    for (const char* c = env::task_type_name(task.task_type); *c; ++c)
        lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(*c)));
    return read_text_file((fs::path(samples_dir) / ("sample_" + lowered + ".plan")).string());
}

Result<SuiteResult> run_suite(const SuiteConfig& config, const llm::TemplateEngine& engine,
                              BackendFactory factory) {
    using R = Result<SuiteResult>;
    if (config.tasks.empty()) return R::failure("config error: task manifest is empty");
    if (config.modes.empty()) return R::failure("config error: no modes selected");
    if (!factory) {
        if (config.scripted && config.remote)
            return R::failure("config error: configure either a scripted or a remote backend");
        if (!config.scripted && !config.remote)
            return R::failure("config error: no backend configured");
        if (config.scripted) {
            for (controller::LoopMode mode : config.modes)
                for (const TaskSpec& task : config.tasks) {
                    EpisodeKey key{mode, task.type, task.seed};
                    if (!fs::is_directory(fixture_dir_for(config.scripted->fixtures_dir, key)))
                        return R::failure("config error: no fixtures for " + episode_id(key) +
                                          " under " + config.scripted->fixtures_dir);
                }
        }
    }
    if (config.skill_rounds > 0 && config.skill_eval_tasks.empty())
        return R::failure("config error: skill_rounds requires skill_eval_tasks");

    struct BackendBundle {
        std::unique_ptr<llm::Backend> backend;
        std::string error;
    };
    auto build_backend = [&](const EpisodeKey& key,
                             llm::LlmTranscript* transcript) -> BackendBundle {
        if (factory) {
            auto backend = factory(key, transcript);
            if (!backend) return {nullptr, "backend factory returned nothing"};
            return {std::move(backend), ""};
        }
        if (config.scripted) {
            auto queues =
                llm::load_scripted_queues(fixture_dir_for(config.scripted->fixtures_dir, key));
            if (!queues.ok()) return {nullptr, queues.error()};
            return {std::make_unique<llm::ScriptedBackend>(queues.value(),
                                                           config.scripted->strict, transcript),
                    ""};
        }
        return {std::make_unique<llm::RemoteBackend>(*config.remote, transcript), ""};
    };

    skills::SkillStore store;
    if (!config.skill_store.empty() && fs::exists(config.skill_store)) {
        auto loaded = skills::load_store(config.skill_store);
        if (!loaded.ok()) return R::failure(loaded.error());
        store = loaded.value();
    }

    auto run_one = [&](const EpisodeKey& key, const std::string& exemplar) {
        EpisodeRow row;
        row.key = key;
        row.id = episode_id(key);
        llm::LlmTranscript transcript;
        BackendBundle bundle = build_backend(key, &transcript);
        if (!bundle.backend) {
            row.error = bundle.error;
            return row;
        }
        env::EnvSession session = env::make_session(key.type, key.seed);
        controller::ControllerConfig episode_config;
        episode_config.mode = key.mode;
        episode_config.max_refinement_rounds = config.max_refinement_rounds;
        episode_config.max_repair_attempts = config.max_repair_attempts;
        episode_config.action_cap = config.action_cap;
        episode_config.exemplar = exemplar;
        row.record = controller::run_episode(episode_config, session, engine, *bundle.backend);
        row.transcript = transcript.snapshot();
        row.success = row.record.success();
        return row;
    };

    auto run_wave = [&]() {
        std::vector<EpisodeKey> keys;
        for (controller::LoopMode mode : config.modes)
            for (const TaskSpec& task : config.tasks) keys.push_back({mode, task.type, task.seed});
        std::vector<EpisodeRow> rows(keys.size());
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < keys.size();) {
                // Exemplar lookup is read-only on the store during a wave.
                std::string exemplar = exemplar_for(
                    store, env::generate_task(keys[i].type, keys[i].seed).task,
                    config.samples_dir);
                rows[i] = run_one(keys[i], exemplar);
            }
        };
        const std::size_t pool_size =
            std::min<std::size_t>(std::max(1, config.workers), keys.size());
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(work);
        for (std::thread& thread : pool) thread.join();
        std::sort(rows.begin(), rows.end(),
                  [](const EpisodeRow& a, const EpisodeRow& b) { return a.id < b.id; });
        return rows;
    };

    // Skill discovery prelude: alternate acquisition and filtering, then run
    // the measured suite with whatever the store ended up holding.
    for (int round = 0; round < config.skill_rounds; ++round) {
        std::vector<EpisodeRow> discovery = run_wave();
        std::vector<controller::EpisodeRecord> successes;
        for (EpisodeRow& row : discovery)
            if (row.success) successes.push_back(row.record);
        for (skills::SkillRecord& candidate : skills::acquire(successes)) {
            std::vector<skills::EvalTask> eval_tasks;
            for (const TaskSpec& task : config.skill_eval_tasks)
                if (skills::skill_signature(task.type) == candidate.signature)
                    eval_tasks.push_back({task.type, task.seed});
            if (eval_tasks.empty()) continue;

            const controller::LoopMode eval_mode = config.modes.back();
            const std::string baseline = exemplar_for(
                store, env::generate_task(candidate.task_type, eval_tasks[0].seed).task,
                config.samples_dir);
            skills::EvalRunner runner = [&](const skills::EvalTask& task,
                                            const std::string& exemplar) {
                return run_one(EpisodeKey{eval_mode, task.type, task.seed}, exemplar).success;
            };
            auto filtered = skills::filter_skill(candidate, eval_tasks, baseline, runner);
            if (filtered.ok()) skills::add_record(store, filtered.value());
        }
    }
    if (config.skill_rounds > 0 && !config.skill_store.empty()) {
        auto saved = skills::persist(store, config.skill_store);
        if (!saved.ok()) return R::failure(saved.error());
    }

    SuiteResult result;
    result.max_round_budget = config.max_refinement_rounds;
    result.episodes = run_wave();
    for (const EpisodeRow& row : result.episodes) result.summaries.push_back(summarize(row));
    result.aggregates = aggregate(result.summaries, result.max_round_budget);

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) return R::failure("cannot create output directory " + config.out_dir);
    const fs::path out(config.out_dir);

    std::ostringstream traces;
    json meta{{"kind", "meta"},
              {"generated", iso_timestamp_utc()},
              {"tasks", config.tasks.size()},
              {"episodes", result.episodes.size()},
              {"action_cap", config.action_cap},
              {"max_refinement_rounds", config.max_refinement_rounds}};
    traces << meta.dump() << "\n";
    for (const EpisodeRow& row : result.episodes) traces << episode_trace_json(row).dump() << "\n";
    auto wrote = write_text_file((out / "traces.jsonl").string(), traces.str());
    if (!wrote.ok()) return R::failure(wrote.error());

    std::ostringstream transcripts;
    for (const EpisodeRow& row : result.episodes)
        transcripts << transcript_trace_json(row).dump() << "\n";
    wrote = write_text_file((out / "transcripts.jsonl").string(), transcripts.str());
    if (!wrote.ok()) return R::failure(wrote.error());

    json results{{"max_round_budget", result.max_round_budget}, {"episodes", json::array()}};
    for (const EpisodeSummary& summary : result.summaries)
        results["episodes"].push_back(summary_json(summary));
    wrote = write_text_file((out / "results.json").string(), results.dump(2) + "\n");
    if (!wrote.ok()) return R::failure(wrote.error());

    wrote = write_text_file((out / "results.csv").string(), render_table_csv(result));
    if (!wrote.ok()) return R::failure(wrote.error());
    wrote = write_text_file((out / "results.txt").string(),
                            "generated: " + iso_timestamp_utc() + "\n" +
                                render_table_text(result));
    if (!wrote.ok()) return R::failure(wrote.error());

    return result;
}

std::string render_table_csv(const SuiteResult& result) {
    std::ostringstream out;
    out << "mode";
    for (env::TaskType type : kTypeOrder) out << "," << env::task_type_name(type);
    out << ",All\n";
    for (const auto& [mode, agg] : result.aggregates) {
        out << controller::loop_mode_name(mode);
        for (env::TaskType type : kTypeOrder) {
            auto it = agg.per_type.find(type);
            out << ","
                << (it == agg.per_type.end() ? "—"
                                             : percent_cell(it->second.first, it->second.second));
        }
        out << "," << percent_cell(agg.successes, agg.total) << "\n";
    }
    return out.str();
}

std::string render_table_text(const SuiteResult& result) {
    constexpr std::size_t kModeWidth = 10;
    constexpr std::size_t kCellWidth = 9;
    std::ostringstream out;

    out << "success rate (%)\n";
    out << std::string(kModeWidth, ' ');
    for (env::TaskType type : kTypeOrder) out << pad_left(env::task_type_name(type), kCellWidth);
    out << pad_left("All", kCellWidth) << "\n";
    for (const auto& [mode, agg] : result.aggregates) {
        std::string row = controller::loop_mode_name(mode);
        row.resize(kModeWidth, ' ');
        out << row;
        for (env::TaskType type : kTypeOrder) {
            auto it = agg.per_type.find(type);
            out << pad_left(it == agg.per_type.end()
                                ? "—"
                                : percent_cell(it->second.first, it->second.second),
                            kCellWidth);
        }
        out << pad_left(percent_cell(agg.successes, agg.total), kCellWidth) << "\n";
    }

    out << "\nmean cost per episode\n";
    out << std::string(kModeWidth, ' ') << pad_left("llm_calls", 12) << pad_left("env_actions", 12)
        << pad_left("rounds", 12) << "\n";
    for (const auto& [mode, agg] : result.aggregates) {
        std::string row = controller::loop_mode_name(mode);
        row.resize(kModeWidth, ' ');
        out << row << pad_left(two_decimals(agg.mean_llm_calls), 12)
            << pad_left(two_decimals(agg.mean_env_actions), 12)
            << pad_left(two_decimals(agg.mean_refinement_rounds), 12) << "\n";
    }

    out << "\nsuccess rate (%) by refinement-round budget\n";
    out << std::string(kModeWidth, ' ');
    for (int budget = 0; budget <= result.max_round_budget; ++budget)
        out << pad_left(std::to_string(budget), kCellWidth);
    out << "\n";
    for (const auto& [mode, agg] : result.aggregates) {
        std::string row = controller::loop_mode_name(mode);
        row.resize(kModeWidth, ' ');
        out << row;
        for (int count : agg.round_curve) out << pad_left(percent_cell(count, agg.total), kCellWidth);
        out << "\n";
    }
    return out.str();
}

Result<SuiteResult> load_result(const std::string& path) {
    using R = Result<SuiteResult>;
    std::ifstream in(path);
    if (!in) return R::failure("cannot open " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) return R::failure(path + " is not valid JSON");
    if (!doc.is_object() || !doc.contains("episodes"))
        return R::failure(path + " is not a results file");

    SuiteResult result;
    result.max_round_budget = doc.value("max_round_budget", 0);
    for (const json& node : doc.at("episodes")) {
        auto summary = summary_from_json(node);
        if (!summary.ok()) return R::failure("bad episode entry: " + summary.error());
        result.summaries.push_back(summary.value());
    }
    result.aggregates = aggregate(result.summaries, result.max_round_budget);
    return result;
}

Result<std::string> replay_trace(const std::string& traces_path, const std::string& id,
                                 bool check) {
    using R = Result<std::string>;
    std::ifstream in(traces_path);
    if (!in) return R::failure("cannot open " + traces_path);

    std::vector<json> episodes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json node = json::parse(line, nullptr, false);
        if (node.is_discarded()) return R::failure("corrupt trace line in " + traces_path);
        if (node.value("kind", "") == "episode") episodes.push_back(std::move(node));
    }

    if (check) {
        int checked = 0;
        for (const json& episode : episodes) {
            const std::string episode_name = episode.value("id", "?");
            if (!id.empty() && episode_name != id) continue;
            ++checked;
            int actions = 0;
            for (const json& round : episode.at("rounds")) actions += static_cast<int>(round.size());
            if (actions != episode.at("env_actions").get<int>())
                return R::failure(episode_name + ": env_actions " +
                                  std::to_string(episode.at("env_actions").get<int>()) +
                                  " does not match " + std::to_string(actions) +
                                  " recorded interactions");
            if (!episode.at("plan_generation_failed").get<bool>() &&
                !episode.at("plans").empty()) {
                const int rounds = episode.at("refinement_rounds").get<int>();
                if (static_cast<int>(episode.at("plans").size()) != rounds + 1)
                    return R::failure(episode_name + ": " +
                                      std::to_string(episode.at("plans").size()) +
                                      " plans for " + std::to_string(rounds) +
                                      " refinement rounds");
                if (static_cast<int>(episode.at("start_froms").size()) != rounds)
                    return R::failure(episode_name + ": start_froms out of step with rounds");
            }
            if (episode.at("success").get<bool>() &&
                episode.value("outcome", "") != "success")
                return R::failure(episode_name + ": success flag contradicts outcome");
        }
        if (checked == 0) return R::failure("no episode matches " + (id.empty() ? "*" : id));
        return std::to_string(checked) + " episode(s) consistent\n";
    }

    for (const json& episode : episodes) {
        if (episode.value("id", "") != id) continue;
        std::ostringstream out;
        out << episode.value("id", "") << "\n";
        out << "goal: " << episode.value("goal", "") << "\n";
        out << "outcome: " << episode.value("outcome", "") << "\n";
        const json& plans = episode.at("plans");
        const json& rounds = episode.at("rounds");
        const json& start_froms = episode.at("start_froms");
        if (!episode.value("initial_observation", std::string()).empty())
            out << "\n" << episode.value("initial_observation", std::string()) << "\n";
        for (std::size_t i = 0; i < rounds.size(); ++i) {
            out << "\n--- attempt " << (i + 1);
            if (i > 0 && i - 1 < start_froms.size())
                out << " (resumed from sub-goal " << start_froms[i - 1].get<int>() << ")";
            out << "\n";
            if (i < plans.size()) out << plans[i].get<std::string>();
            for (const json& interaction : rounds[i])
                out << "> " << interaction[0].get<std::string>() << "\n"
                    << interaction[1].get<std::string>() << "\n";
        }
        const std::string report = episode.value("report", std::string());
        if (!report.empty()) out << "\nlast report:\n" << report << "\n";
        return out.str();
    }
    return R::failure("no episode with id " + id + " in " + traces_path);
}

} // namespace planloop::harness
