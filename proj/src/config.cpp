#include "tspe/config.hpp"

#include <fstream>

#include "json.hpp"
#include "tspe/errors.hpp"

namespace tspe {

using nlohmann::json;

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "tspe-config-v1")
        throw ConfigError("config " + path.string() + ": unexpected format tag");

    RunConfig config;
    const std::filesystem::path base = path.parent_path();
    auto resolve = [&](const std::string& p) -> std::filesystem::path {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;  // relative to the config file
    };
    if (j.contains("taxonomy")) config.taxonomy_path = resolve(j["taxonomy"].get<std::string>());
    if (j.contains("dataset_roots"))
        for (const auto& [id, root] : j["dataset_roots"].items())
            config.dataset_roots[id] = resolve(root.get<std::string>());
    if (j.contains("cache_dir")) config.cache_dir = resolve(j["cache_dir"].get<std::string>());
    if (j.contains("out_dir")) config.out_dir = resolve(j["out_dir"].get<std::string>());
    config.seed = j.value("seed", std::uint64_t{0});
    config.jobs = j.value("jobs", 0);
    if (j.contains("backend_endpoints"))
        for (const auto& [id, endpoint] : j["backend_endpoints"].items())
            config.backend_endpoints[id] = endpoint.get<std::string>();
    if (j.contains("generator")) {
        const json& g = j["generator"];
        config.generator.endpoint = g.value("endpoint", "");
        config.generator.model = g.value("model", "default");
        config.generator.api_key_env = g.value("api_key_env", "");
    }
    return config;
}

void RunConfig::validate_paths() const {
    if (!std::filesystem::exists(taxonomy_path))
        throw ConfigError("taxonomy file not found: " + taxonomy_path.string());
    for (const auto& [id, root] : dataset_roots)
        if (!std::filesystem::exists(root))
            throw ConfigError("dataset root for '" + id + "' not found: " + root.string());
}

}  // namespace tspe
