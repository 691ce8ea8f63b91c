#include "planloop/harness/suite.hpp"
#include "planloop/plan/parse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace planloop;
using nlohmann::json;

namespace {

int fail(const std::string& message) {
    std::cerr << "planloop: " << message << "\n";
    return 2;
}

Result<std::vector<json>> read_trace_episodes(const std::string& path) {
    using R = Result<std::vector<json>>;
    std::ifstream in(path);
    if (!in) return R::failure("cannot open " + path);
    std::vector<json> episodes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json node = json::parse(line, nullptr, false);
        if (node.is_discarded()) return R::failure("corrupt trace line in " + path);
        if (node.value("kind", "") == "episode") episodes.push_back(std::move(node));
    }
    return episodes;
}

int run_command(const std::string& config_path, const std::vector<std::string>& mode_names,
                const std::string& backend_spec, int rounds, int cap, long long seed,
                const std::string& out_dir, int workers) {
    auto loaded = harness::load_suite_config(config_path);
    if (!loaded.ok()) return fail(loaded.error());
    harness::SuiteConfig config = std::move(loaded).value();

    if (!mode_names.empty()) {
        config.modes.clear();
        for (const std::string& name : mode_names) {
            auto mode = controller::loop_mode_from_name(name);
            if (!mode) return fail("unknown mode " + name);
            config.modes.push_back(*mode);
        }
    }
    if (!backend_spec.empty()) {
        config.scripted.reset();
        config.remote.reset();
        if (backend_spec.rfind("scripted:", 0) == 0) {
            config.scripted = harness::ScriptedBackendConfig{backend_spec.substr(9), true};
        } else if (backend_spec.rfind("remote:", 0) == 0) {
            llm::RemoteConfig remote;
            remote.base_url = backend_spec.substr(7);
            config.remote = remote;
        } else {
            return fail("backend must be scripted:DIR or remote:URL");
        }
    }
    if (rounds >= 0) config.max_refinement_rounds = rounds;
    if (cap >= 0) config.action_cap = cap;
    if (seed >= 0) config.seed = static_cast<unsigned>(seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (workers > 0) config.workers = workers;

    auto engine = llm::TemplateEngine::load(config.prompts_dir);
    if (!engine.ok()) return fail(engine.error());
    auto result = harness::run_suite(config, engine.value());
    if (!result.ok()) return fail(result.error());

    std::cout << harness::render_table_text(result.value());
    std::cout << "\nartifacts written to " << config.out_dir << "\n";
    return 0;
}

int report_command(const std::string& result_path, const std::string& format) {
    auto result = harness::load_result(result_path);
    if (!result.ok()) return fail(result.error());
    std::cout << (format == "csv" ? harness::render_table_csv(result.value())
                                  : harness::render_table_text(result.value()));
    return 0;
}

int skills_acquire_command(const std::string& traces_path, const std::string& store_path) {
    auto episodes = read_trace_episodes(traces_path);
    if (!episodes.ok()) return fail(episodes.error());

    std::vector<controller::EpisodeRecord> records;
    for (const json& node : episodes.value()) {
        if (!node.value("success", false)) continue;
        auto type = env::task_type_from_name(node.value("task_type", ""));
        if (!type) return fail("unknown task type in trace: " + node.value("task_type", ""));
        controller::EpisodeRecord record;
        record.task = env::generate_task(*type, node.value("seed", 0u)).task;
        record.outcome = interp::OutcomeStatus::Success;
        record.env_actions = node.value("env_actions", 0);
        record.refinement_rounds = node.value("refinement_rounds", 0);
        for (const json& plan_text : node.at("plans")) {
            auto parsed = plan::parse_plan(plan_text.get<std::string>());
            if (!parsed.ok())
                return fail("unparsable plan in trace for " + node.value("id", "?") + ": " +
                            parsed.error().to_string());
            record.plans.push_back(parsed.value());
        }
        if (record.plans.empty()) continue;
        records.push_back(std::move(record));
    }

    skills::SkillStore store;
    if (std::filesystem::exists(store_path)) {
        auto loaded = skills::load_store(store_path);
        if (!loaded.ok()) return fail(loaded.error());
        store = loaded.value();
    }
    std::vector<skills::SkillRecord> candidates = skills::acquire(records);
    for (skills::SkillRecord& candidate : candidates) skills::add_record(store, candidate);
    auto saved = skills::persist(store, store_path);
    if (!saved.ok()) return fail(saved.error());
    std::cout << candidates.size() << " candidate(s) added to " << store_path << "\n";
    return 0;
}

int skills_filter_command(const std::string& store_path, const std::string& config_path) {
    auto loaded_store = skills::load_store(store_path);
    if (!loaded_store.ok()) return fail(loaded_store.error());
    skills::SkillStore store = loaded_store.value();

    auto loaded_config = harness::load_suite_config(config_path);
    if (!loaded_config.ok()) return fail(loaded_config.error());
    const harness::SuiteConfig config = loaded_config.value();
    if (config.skill_eval_tasks.empty())
        return fail("config error: skill_eval_tasks is empty; nothing to filter against");
    if (!config.scripted && !config.remote) return fail("config error: no backend configured");

    auto engine = llm::TemplateEngine::load(config.prompts_dir);
    if (!engine.ok()) return fail(engine.error());
    const controller::LoopMode mode =
        config.modes.empty() ? controller::LoopMode::Explicit : config.modes.back();

    skills::SkillStore updated;
    for (const skills::SkillRecord& record : store.records) {
        if (record.status != skills::SkillStatus::Candidate) {
            skills::add_record(updated, record);
            continue;
        }
        std::vector<skills::EvalTask> eval_tasks;
        for (const harness::TaskSpec& task : config.skill_eval_tasks)
            if (skills::skill_signature(task.type) == record.signature)
                eval_tasks.push_back({task.type, task.seed});
        if (eval_tasks.empty()) {
            std::cout << record.signature << ": no same-signature eval tasks, left as candidate\n";
            skills::add_record(updated, record);
            continue;
        }

        const std::string baseline =
            harness::exemplar_for(skills::SkillStore{},
                                  env::generate_task(record.task_type, eval_tasks[0].seed).task,
                                  config.samples_dir);
        skills::EvalRunner runner = [&](const skills::EvalTask& task,
                                        const std::string& exemplar) {
            harness::EpisodeKey key{mode, task.type, task.seed};
            llm::LlmTranscript transcript;
            std::unique_ptr<llm::Backend> backend;
            if (config.scripted) {
                auto queues = llm::load_scripted_queues(
                    harness::fixture_dir_for(config.scripted->fixtures_dir, key));
                if (!queues.ok()) return false;
                backend = std::make_unique<llm::ScriptedBackend>(
                    queues.value(), config.scripted->strict, &transcript);
            } else {
                backend = std::make_unique<llm::RemoteBackend>(*config.remote, &transcript);
            }
            env::EnvSession session = env::make_session(task.type, task.seed);
            controller::ControllerConfig episode_config;
            episode_config.mode = key.mode;
            episode_config.max_refinement_rounds = config.max_refinement_rounds;
            episode_config.max_repair_attempts = config.max_repair_attempts;
            episode_config.action_cap = config.action_cap;
            episode_config.exemplar = exemplar;
            return controller::run_episode(episode_config, session, engine.value(), *backend)
                .success();
        };
        auto filtered = skills::filter_skill(record, eval_tasks, baseline, runner);
        if (!filtered.ok()) return fail(filtered.error());
        skills::add_record(updated, filtered.value());
        std::cout << record.signature << ": "
                  << skills::skill_status_name(filtered.value().status) << " ("
                  << filtered.value().eval.rate_without << " -> "
                  << filtered.value().eval.rate_with << ")\n";
    }
    auto saved = skills::persist(updated, store_path);
    if (!saved.ok()) return fail(saved.error());
    return 0;
}

int skills_list_command(const std::string& store_path) {
    auto loaded = skills::load_store(store_path);
    if (!loaded.ok()) return fail(loaded.error());
    for (const skills::SkillRecord& record : loaded.value().records)
        std::cout << record.signature << "  " << skills::skill_status_name(record.status)
                  << "  without=" << record.eval.rate_without
                  << " with=" << record.eval.rate_with << "  from=" << record.episode_id
                  << " actions=" << record.env_actions << "\n";
    if (loaded.value().records.empty()) std::cout << "(store is empty)\n";
    return 0;
}

int replay_command(const std::string& trace_path, const std::string& id, bool check) {
    if (!check && id.empty()) return fail("--id is required unless --check is given");
    auto rendered = harness::replay_trace(trace_path, id, check);
    if (!rendered.ok()) return fail(rendered.error());
    std::cout << rendered.value();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-loop plan-execute-refine harness"};
    app.require_subcommand(1);

    std::string config_path, backend_spec, out_dir;
    std::vector<std::string> mode_names;
    int rounds = -1, cap = -1, workers = -1;
    long long seed = -1;
    auto* run = app.add_subcommand("run", "run a task suite from a config file");
    run->add_option("--config", config_path, "suite config (JSON)")->required();
    run->add_option("--mode", mode_names, "override modes (open|implicit|explicit)");
    run->add_option("--backend", backend_spec, "override backend (scripted:DIR | remote:URL)");
    run->add_option("--rounds", rounds, "override max refinement rounds");
    run->add_option("--cap", cap, "override the action cap");
    run->add_option("--seed", seed, "override the global seed");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--workers", workers, "override the worker count");

    std::string result_path, format = "text";
    auto* report = app.add_subcommand("report", "re-render tables from results.json");
    report->add_option("--result", result_path, "results.json path")->required();
    report->add_option("--format", format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));

    std::string traces_path, store_path, skills_config;
    auto* skills_cmd = app.add_subcommand("skills", "skill memory maintenance");
    skills_cmd->require_subcommand(1);
    auto* acquire = skills_cmd->add_subcommand("acquire", "collect candidates from a trace");
    acquire->add_option("--traces", traces_path, "traces.jsonl path")->required();
    acquire->add_option("--store", store_path, "skill store (JSON)")->required();
    auto* filter = skills_cmd->add_subcommand("filter", "evaluate candidates against eval tasks");
    filter->add_option("--store", store_path, "skill store (JSON)")->required();
    filter->add_option("--config", skills_config, "suite config with skill_eval_tasks")
        ->required();
    auto* list = skills_cmd->add_subcommand("list", "print the store contents");
    list->add_option("--store", store_path, "skill store (JSON)")->required();

    std::string trace_path, episode;
    bool check = false;
    auto* replay = app.add_subcommand("replay", "re-render one traced episode");
    replay->add_option("--trace", trace_path, "traces.jsonl path")->required();
    replay->add_option("--id", episode, "episode id, e.g. explicit/Clean-2521");
    replay->add_flag("--check", check, "verify trace consistency instead of rendering");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return run_command(config_path, mode_names, backend_spec, rounds, cap, seed, out_dir,
                           workers);
    if (report->parsed()) return report_command(result_path, format);
    if (skills_cmd->parsed()) {
        if (acquire->parsed()) return skills_acquire_command(traces_path, store_path);
        if (filter->parsed()) return skills_filter_command(store_path, skills_config);
        if (list->parsed()) return skills_list_command(store_path);
    }
    if (replay->parsed()) return replay_command(trace_path, episode, check);
    return fail("no subcommand");
}
