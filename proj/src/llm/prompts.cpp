#include "planloop/llm/gateway.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace planloop::llm {

namespace {

const PromptKind kTemplateKinds[] = {
    PromptKind::BasicInfo, PromptKind::InitialPlanning, PromptKind::CodeCheck,
    PromptKind::Refinement, PromptKind::StartFrom,      PromptKind::AskLlm,
};

// Every placeholder name any template may use; anything else inside <...> is
// ordinary prose and ignored.
const std::vector<std::string> kAllPlaceholders = {
    "basic_info",       "sample",           "receptacle_list", "task",    "error_msg",
    "previous_solution", "revised_solution", "solution_func",   "question",
};

Result<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return Result<std::string>::failure("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& replacement) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = text.find(needle, pos);
        if (hit == std::string::npos) {
            out += text.substr(pos);
            return out;
        }
        out += text.substr(pos, hit - pos);
        out += replacement;
        pos = hit + needle.size();
    }
}

} // namespace

const char* prompt_kind_name(PromptKind kind) {
    switch (kind) {
    case PromptKind::BasicInfo: return "basic_info";
    case PromptKind::InitialPlanning: return "initial_planning";
    case PromptKind::CodeCheck: return "code_check";
    case PromptKind::Refinement: return "refinement";
    case PromptKind::StartFrom: return "start_from";
    case PromptKind::AskLlm: return "ask_llm";
    case PromptKind::Unknown: return "unknown";
    }
    return "unknown";
}

std::optional<PromptKind> prompt_kind_from_name(const std::string& name) {
    for (PromptKind kind : kTemplateKinds)
        if (name == prompt_kind_name(kind)) return kind;
    return std::nullopt;
}

Result<PromptKind> classify_prompt(const std::string& prompt) {
    const std::string sentinel = kKindSentinel;
    if (prompt.compare(0, sentinel.size(), sentinel) != 0)
        return Result<PromptKind>::failure("unknown prompt kind: no sentinel header");
    std::size_t eol = prompt.find('\n');
    std::string name = prompt.substr(sentinel.size(),
                                     eol == std::string::npos ? std::string::npos
                                                              : eol - sentinel.size());
    auto kind = prompt_kind_from_name(name);
    if (!kind) return Result<PromptKind>::failure("unknown prompt kind '" + name + "'");
    return *kind;
}

std::string strip_sentinel(const std::string& prompt) {
    if (prompt.compare(0, std::string(kKindSentinel).size(), kKindSentinel) != 0) return prompt;
    std::size_t eol = prompt.find('\n');
    if (eol == std::string::npos) return "";
    return prompt.substr(eol + 1);
}

const std::vector<std::string>& TemplateEngine::declared_placeholders(PromptKind kind) {
    static const std::vector<std::string> none;
    static const std::vector<std::string> planning = {"sample", "receptacle_list", "task"};
    static const std::vector<std::string> check = {"solution_func", "error_msg"};
    static const std::vector<std::string> refine = {"sample", "receptacle_list", "task",
                                                    "error_msg"};
    static const std::vector<std::string> resume = {"previous_solution", "revised_solution"};
    static const std::vector<std::string> ask = {"question"};
    switch (kind) {
    case PromptKind::InitialPlanning: return planning;
    case PromptKind::CodeCheck: return check;
    case PromptKind::Refinement: return refine;
    case PromptKind::StartFrom: return resume;
    case PromptKind::AskLlm: return ask;
    default: return none;
    }
}

Result<TemplateEngine> TemplateEngine::load(const std::string& dir) {
    TemplateEngine engine;
    for (PromptKind kind : kTemplateKinds) {
        std::filesystem::path path =
            std::filesystem::path(dir) / (std::string(prompt_kind_name(kind)) + ".txt");
        auto content = read_file(path);
        if (!content.ok()) return Result<TemplateEngine>::failure(content.error());
        engine.bodies_[kind] = std::move(content.value());
    }

    // basic_info is substituted into the other bodies up front; it carries no
    // placeholders of its own.
    const std::string& info = engine.bodies_.at(PromptKind::BasicInfo);
    for (PromptKind kind : kTemplateKinds) {
        if (kind == PromptKind::BasicInfo) continue;
        engine.bodies_[kind] = replace_all(engine.bodies_[kind], "<basic_info>", info);
    }

    for (PromptKind kind : kTemplateKinds) {
        const std::vector<std::string>& declared = declared_placeholders(kind);
        for (const std::string& name : kAllPlaceholders) {
            if (engine.bodies_[kind].find("<" + name + ">") == std::string::npos) continue;
            bool is_declared = false;
            for (const std::string& ok : declared) is_declared |= ok == name;
            if (!is_declared)
                return Result<TemplateEngine>::failure(
                    std::string(prompt_kind_name(kind)) + ".txt uses undeclared placeholder <" +
                    name + ">");
        }
    }
    return engine;
}

Result<std::string> TemplateEngine::render(
    PromptKind kind, const std::map<std::string, std::string>& substitutions) const {
    const std::string& body = bodies_.at(kind);
    const std::vector<std::string>& declared = declared_placeholders(kind);

    for (const std::string& name : declared)
        if (body.find("<" + name + ">") != std::string::npos && !substitutions.count(name))
            return Result<std::string>::failure("missing substitution for <" + name + ">");

    // Single left-to-right pass; substituted values are never re-scanned.
    std::string out = std::string(kKindSentinel) + prompt_kind_name(kind) + "\n";
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t best_hit = std::string::npos;
        const std::string* best_name = nullptr;
        for (const std::string& name : declared) {
            std::size_t hit = body.find("<" + name + ">", pos);
            if (hit < best_hit) {
                best_hit = hit;
                best_name = &name;
            }
        }
        if (!best_name) {
            out += body.substr(pos);
            break;
        }
        out += body.substr(pos, best_hit - pos);
        out += substitutions.at(*best_name);
        pos = best_hit + best_name->size() + 2;
    }
    return out;
}

} // namespace planloop::llm
