#include "tspe/http_backend.hpp"

#include "httplib.h"
#include "json.hpp"
#include "tspe/errors.hpp"

namespace tspe {
namespace {

using nlohmann::json;

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("http backend: endpoint is empty");
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_s);
    client.set_read_timeout(config_.timeout_s);
    auto res = client.Get("/info");
    if (!res || res->status != 200)
        throw BackendLoadError("embedding service at " + config_.endpoint +
                               " is not answering /info");
    json j;
    try {
        j = json::parse(res->body);
    } catch (const json::exception& e) {
        throw BackendLoadError(std::string("embedding service /info is not JSON: ") + e.what());
    }
    info_.backend_id = j.value("backend_id", "");
    info_.dimension = j.value("dimension", std::size_t{0});
    info_.text_capable = j.value("text", false);
    info_.audio_capable = j.value("audio", false);
    info_.seed_sensitive = j.value("seed_sensitive", false);
    info_.preprocessing = j.value("preprocessing", "");
    if (!config_.backend_id.empty() && info_.backend_id != config_.backend_id)
        throw BackendLoadError("embedding service at " + config_.endpoint + " serves '" +
                               info_.backend_id + "', expected '" + config_.backend_id + "'");
    if (info_.dimension == 0)
        throw BackendLoadError("embedding service declares dimension 0");
}

std::vector<Embedding> HttpBackend::post_embed(const std::string& path, const std::string& body,
                                               std::size_t expected) {
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_s);
    client.set_read_timeout(config_.timeout_s);
    auto res = client.Post(path, body, "application/json");
    if (!res)
        throw EncodeError("embedding service at " + config_.endpoint + " dropped " + path +
                          " (" + httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw EncodeError("embedding service " + path + " returned HTTP " +
                          std::to_string(res->status) + ": " + res->body);
    json j;
    try {
        j = json::parse(res->body);
    } catch (const json::exception& e) {
        throw EncodeError(std::string("embedding service reply is not JSON: ") + e.what());
    }
    std::vector<Embedding> out;
    for (const json& row : j.at("embeddings")) {
        Embedding e;
        e.values = row.get<std::vector<double>>();
        out.push_back(std::move(e));
    }
    if (out.size() != expected)
        throw EncodeError("embedding service returned " + std::to_string(out.size()) +
                          " vectors for " + std::to_string(expected) + " inputs");
    return out;
}

std::vector<Embedding> HttpBackend::encode_text(const std::vector<std::string>& texts) {
    return post_embed("/embed_text", json{{"texts", texts}}.dump(), texts.size());
}

std::vector<Embedding> HttpBackend::encode_audio(
    const std::vector<std::filesystem::path>& clips) {
    std::vector<std::string> paths;
    paths.reserve(clips.size());
    for (const auto& clip : clips) {
        if (!std::filesystem::exists(clip))
            throw AudioDecodeError("clip not found: " + clip.string());
        paths.push_back(std::filesystem::absolute(clip).string());
    }
    return post_embed("/embed_audio", json{{"paths", paths}}.dump(), clips.size());
}

}  // namespace tspe
