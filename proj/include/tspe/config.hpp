#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace tspe {

// Remote chat-generator connection settings (gen subcommands).
struct GeneratorConfig {
    std::string endpoint;
    std::string model = "default";
    std::string api_key_env;
};

// Everything a run needs beyond its command line. Loaded from a JSON config
// file; individual flags override fields. Referenced paths are checked at
// validation time.
struct RunConfig {
    std::filesystem::path taxonomy_path = "data/taxonomy.json";
    std::map<std::string, std::filesystem::path> dataset_roots;
    std::filesystem::path cache_dir;
    std::filesystem::path out_dir = "runs";
    std::uint64_t seed = 0;
    int jobs = 0;  // 0 → one per hardware thread
    // backend_id → embedding service endpoint; the TSPE_MSCLAP22_ENDPOINT /
    // TSPE_MSCLAP23_ENDPOINT environment variables fill gaps.
    std::map<std::string, std::string> backend_endpoints;
    GeneratorConfig generator;

    static RunConfig load(const std::filesystem::path& path);

    // Throws ConfigError when the taxonomy file or a dataset root is absent.
    void validate_paths() const;
};

}  // namespace tspe
