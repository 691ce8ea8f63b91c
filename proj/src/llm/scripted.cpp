#include "planloop/llm/gateway.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace planloop::llm {

int approximate_tokens(const std::string& text) {
    std::istringstream stream(text);
    std::string word;
    int count = 0;
    while (stream >> word) ++count;
    return count;
}

void LlmTranscript::append(TranscriptRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_.push_back(std::move(record));
}

std::vector<TranscriptRecord> LlmTranscript::snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_;
}

std::size_t LlmTranscript::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_.size();
}

Result<ScriptedQueues> load_scripted_queues(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        return Result<ScriptedQueues>::failure("not a directory: " + dir);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());

    ScriptedQueues queues;
    for (const std::string& name : names) {
        // "<kind>.txt" or "<kind>.NN.txt"; the sort above orders the queue.
        std::string stem = name.substr(0, name.size() - 4);
        std::size_t dot = stem.find('.');
        std::string kind_name = dot == std::string::npos ? stem : stem.substr(0, dot);
        auto kind = prompt_kind_from_name(kind_name);
        if (!kind)
            return Result<ScriptedQueues>::failure("unrecognized response file " + name);
        std::ifstream in(fs::path(dir) / name);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        queues[*kind].push_back(buffer.str());
    }
    return queues;
}

ScriptedBackend::ScriptedBackend(ScriptedQueues queues, bool strict, LlmTranscript* transcript)
    : queues_(std::move(queues)), strict_(strict), transcript_(transcript) {}

std::size_t ScriptedBackend::remaining(PromptKind kind) const {
    auto it = queues_.find(kind);
    if (it == queues_.end()) return 0;
    auto used = cursor_.find(kind);
    return it->second.size() - (used == cursor_.end() ? 0 : used->second);
}

Result<std::string> ScriptedBackend::complete(const CompletionRequest& request) {
    auto kind = classify_prompt(request.prompt);
    if (!kind.ok()) {
        if (transcript_)
            transcript_->append({PromptKind::Unknown, request.prompt, kind.error(),
                                 approximate_tokens(request.prompt), 0, false, 1});
        return Result<std::string>::failure(kind.error());
    }

    std::size_t& used = cursor_[kind.value()];
    const auto queue = queues_.find(kind.value());
    if (queue == queues_.end() || used >= queue->second.size()) {
        std::string error = std::string("scripted queue exhausted for kind '") +
                            prompt_kind_name(kind.value()) + "'";
        if (strict_) {
            if (transcript_)
                transcript_->append({kind.value(), request.prompt, error,
                                     approximate_tokens(request.prompt), 0, false, 1});
            return Result<std::string>::failure(error);
        }
        if (transcript_)
            transcript_->append({kind.value(), request.prompt, "",
                                 approximate_tokens(request.prompt), 0, true, 1});
        return std::string();
    }

    const std::string& response = queue->second[used++];
    if (transcript_)
        transcript_->append({kind.value(), request.prompt, response,
                             approximate_tokens(request.prompt), approximate_tokens(response),
                             true, 1});
    return response;
}

} // namespace planloop::llm
