#pragma once

#include "planloop/llm/gateway.hpp"

namespace planloop::llm {

struct RemoteConfig {
    std::string base_url;                      // e.g. "http://127.0.0.1:8089"
    std::string path = "/v1/completions";
    std::string model = "text-davinci-003";
    std::string api_key_env = "PLANLOOP_API_KEY"; // name of the env var holding the key
    int timeout_ms = 5000;
    int max_retries = 2; // extra attempts after the first
};

// Text-completion client. Transport failures, 429s and 5xx are retried with
// every attempt logged to the transcript; other statuses are fatal.
class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config, LlmTranscript* transcript = nullptr);

    Result<std::string> complete(const CompletionRequest& request) override;

private:
    RemoteConfig config_;
    LlmTranscript* transcript_;
};

} // namespace planloop::llm
