#include "tspe/remote_generator.hpp"

#include <cstdlib>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "tspe/errors.hpp"

namespace tspe {
namespace {

using nlohmann::json;

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

RemoteGenerator::RemoteGenerator(RemoteGeneratorConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("remote generator: endpoint is empty");
}

std::vector<std::string> RemoteGenerator::complete(const std::string& system_text,
                                                   const std::string& user_text) {
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_s);
    client.set_read_timeout(config_.timeout_s);

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw ConfigError("remote generator: environment variable '" + config_.api_key_env +
                              "' is not set");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const json body = {
        {"model", config_.model},
        {"messages",
         json::array({json{{"role", "system"}, {"content", system_text}},
                      json{{"role", "user"}, {"content", user_text}}})},
    };
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res)
        throw BackendUnavailable("remote generator: cannot reach " + config_.endpoint + " (" +
                                 httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw BackendUnavailable("remote generator: " + config_.endpoint + config_.path +
                                 " returned HTTP " + std::to_string(res->status));
    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("remote generator: malformed JSON reply: ") +
                                 e.what());
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty())
        throw BackendUnavailable("remote generator: reply has no choices");
    const json& message = reply["choices"][0].value("message", json::object());
    if (!message.contains("content") || !message["content"].is_string())
        throw BackendUnavailable("remote generator: reply has no message content");
    return split_lines(message["content"].get<std::string>());
}

std::vector<std::string> RemoteGenerator::propose_terms(const PoolRequest& request) {
    const bool attrs = request.kind == TermKind::Attributes;
    std::ostringstream user;
    user << "List " << request.count << " distinct "
         << (attrs ? "single-word or short adjectives describing how a sound can be perceived"
                   : "short noun phrases naming places or origins a sound can come from")
         << ", one per line, lowercase, with no numbering and no extra words.";
    if (!request.category_descriptions.empty()) {
        user << " They must be broadly applicable across these sound classification tasks:";
        for (const std::string& d : request.category_descriptions) user << ' ' << d << ';';
    }
    return complete(attrs ? "You produce adjectives that describe sounds."
                          : "You produce noun phrases naming sound origins.",
                    user.str());
}

std::vector<std::string> RemoteGenerator::propose_prompts(const PromptRequest& request) {
    if (request.category == nullptr || request.pools == nullptr)
        throw UsageError("propose_prompts: category and pools must be set");
    std::ostringstream user;
    user << "Write " << request.count
         << " prompt patterns for classifying sounds in the task: " << request.category->description
         << ". Keep the literal placeholder <label> where the class name goes. Use only these "
            "three shapes:\n"
         << "A <attribute> sound of a <label>\n"
         << "The sound of a <label> coming from a <source>\n"
         << "A <attribute> sound of a <label> coming from a <source>\n"
         << "Replace <attribute> with one of:";
    for (const std::string& a : request.pools->attributes.attributes) user << ' ' << a << ',';
    user << "\nReplace <source> with one of:";
    for (const std::string& s : request.pools->sources.sources) user << ' ' << s << ',';
    user << "\nOne pattern per line, no numbering, no quotes.";
    return complete("You write short audio classification prompt patterns.", user.str());
}

}  // namespace tspe
