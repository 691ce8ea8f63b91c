#include "planloop/llm/remote.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace planloop::llm {

namespace {

using nlohmann::json;

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

} // namespace

RemoteBackend::RemoteBackend(RemoteConfig config, LlmTranscript* transcript)
    : config_(std::move(config)), transcript_(transcript) {}

Result<std::string> RemoteBackend::complete(const CompletionRequest& request) {
    PromptKind kind = PromptKind::Unknown;
    if (auto classified = classify_prompt(request.prompt); classified.ok())
        kind = classified.value();
    const std::string wire_prompt = strip_sentinel(request.prompt);

    json body = {
        {"model", config_.model},
        {"prompt", wire_prompt},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };
    if (!request.stop.empty()) body["stop"] = request.stop;
    const std::string payload = body.dump();

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto log = [&](bool ok, const std::string& text, int completion_tokens, int attempt) {
        if (transcript_)
            transcript_->append({kind, request.prompt, text, approximate_tokens(wire_prompt),
                                 completion_tokens, ok, attempt});
    };

    std::string last_error = "no attempts made";
    for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
        if (attempt > 1)
            std::this_thread::sleep_for(std::chrono::milliseconds(10 * (attempt - 1)));

        httplib::Result res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            log(false, last_error, 0, attempt);
            continue;
        }
        if (retryable_status(res->status)) {
            last_error = "provider returned status " + std::to_string(res->status);
            log(false, last_error, 0, attempt);
            continue;
        }
        if (res->status != 200) {
            last_error = "provider returned status " + std::to_string(res->status);
            log(false, last_error, 0, attempt);
            return Result<std::string>::failure(last_error);
        }

        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("text")) {
            last_error = "malformed provider response";
            log(false, last_error, 0, attempt);
            return Result<std::string>::failure(last_error);
        }
        std::string text = parsed["choices"][0]["text"].get<std::string>();
        int completion_tokens = approximate_tokens(text);
        if (parsed.contains("usage") && parsed["usage"].contains("completion_tokens"))
            completion_tokens = parsed["usage"]["completion_tokens"].get<int>();
        log(true, text, completion_tokens, attempt);
        return text;
    }
    return Result<std::string>::failure(last_error + " (retries exhausted)");
}

} // namespace planloop::llm
