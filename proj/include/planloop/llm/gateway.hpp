#pragma once

#include "planloop/result.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace planloop::llm {

enum class PromptKind {
    BasicInfo,
    InitialPlanning,
    CodeCheck,
    Refinement,
    StartFrom,
    AskLlm,
    Unknown, // transcript label for foreign text; never a template
};

const char* prompt_kind_name(PromptKind kind);
std::optional<PromptKind> prompt_kind_from_name(const std::string& name);

// First line of every rendered prompt, so scripted backends can route
// responses. The remote backend strips it before hitting the wire.
inline constexpr const char* kKindSentinel = "#kind:";

Result<PromptKind> classify_prompt(const std::string& prompt);

// Prompt text without its sentinel header (as sent to a real provider).
std::string strip_sentinel(const std::string& prompt);

// ---------------------------------------------------------------------------
// Templates.
// ---------------------------------------------------------------------------

class TemplateEngine {
public:
    // Loads <kind>.txt for each template kind from `dir`, expands
    // <basic_info> into the planning/refinement bodies, and verifies that
    // every remaining placeholder is declared for its kind.
    static Result<TemplateEngine> load(const std::string& dir);

    // Exact one-pass substitution; substituted values are never re-scanned.
    // The result starts with the kind sentinel line.
    Result<std::string> render(PromptKind kind,
                               const std::map<std::string, std::string>& substitutions) const;

    const std::string& body(PromptKind kind) const { return bodies_.at(kind); }

    static const std::vector<std::string>& declared_placeholders(PromptKind kind);

private:
    std::map<PromptKind, std::string> bodies_;
};

// ---------------------------------------------------------------------------
// Completions.
// ---------------------------------------------------------------------------

struct CompletionRequest {
    std::string prompt;
    int max_tokens = 1024;
    double temperature = 0.0;
    std::vector<std::string> stop;
};

struct TranscriptRecord {
    PromptKind kind = PromptKind::Unknown;
    std::string prompt;
    std::string response; // error text when !ok
    int prompt_tokens = 0;
    int completion_tokens = 0;
    bool ok = true;
    int attempt = 1; // 1-based; >1 only for remote retries
};

// Append-only, safe under concurrent episode runners.
class LlmTranscript {
public:
    void append(TranscriptRecord record);
    std::vector<TranscriptRecord> snapshot() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<TranscriptRecord> records_;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Result<std::string> complete(const CompletionRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend (deterministic test double).
// ---------------------------------------------------------------------------

using ScriptedQueues = std::map<PromptKind, std::vector<std::string>>;

// Reads <kind>.NN.txt files (NN ordering the queue; plain <kind>.txt allowed)
// into per-kind response queues.
Result<ScriptedQueues> load_scripted_queues(const std::string& dir);

class ScriptedBackend : public Backend {
public:
    ScriptedBackend(ScriptedQueues queues, bool strict, LlmTranscript* transcript = nullptr);

    Result<std::string> complete(const CompletionRequest& request) override;

    std::size_t remaining(PromptKind kind) const;

private:
    ScriptedQueues queues_;
    std::map<PromptKind, std::size_t> cursor_;
    bool strict_;
    LlmTranscript* transcript_;
};

// Whitespace-delimited token estimate used for transcript accounting.
int approximate_tokens(const std::string& text);

} // namespace planloop::llm
