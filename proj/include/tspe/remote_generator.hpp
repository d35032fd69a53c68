#pragma once

#include <string>

#include "tspe/promptgen.hpp"

namespace tspe {

// JSON-over-HTTP chat endpoint (OpenAI-style /v1/chat/completions schema).
struct RemoteGeneratorConfig {
    std::string endpoint;       // e.g. "http://127.0.0.1:8080"
    std::string path = "/v1/chat/completions";
    std::string model = "default";
    std::string api_key_env;    // name of the env var holding a bearer token, optional
    int timeout_s = 60;
};

// Backend that asks a remote chat model for pool terms or prompt lines. The
// reply's message content is split into lines; validation stays with the
// drivers. Connection or protocol failures raise BackendUnavailable.
class RemoteGenerator : public GeneratorBackend {
public:
    explicit RemoteGenerator(RemoteGeneratorConfig config);

    std::string name() const override { return "remote:" + config_.model; }
    std::vector<std::string> propose_terms(const PoolRequest& request) override;
    std::vector<std::string> propose_prompts(const PromptRequest& request) override;

private:
    std::vector<std::string> complete(const std::string& system_text,
                                      const std::string& user_text);

    RemoteGeneratorConfig config_;
};

}  // namespace tspe
