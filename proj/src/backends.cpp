#include "tspe/backends.hpp"

#include <cstdlib>

#include "tspe/errors.hpp"
#include "tspe/http_backend.hpp"
#include "tspe/mock_backend.hpp"

namespace tspe {
namespace {

std::string endpoint_for(const std::string& backend_id, const RunConfig& config,
                         const char* env_name) {
    if (auto it = config.backend_endpoints.find(backend_id);
        it != config.backend_endpoints.end() && !it->second.empty())
        return it->second;
    if (const char* env = std::getenv(env_name); env != nullptr && *env != '\0') return env;
    throw BackendUnavailable("backend '" + backend_id +
                             "' needs an embedding service endpoint; set " +
                             std::string(env_name) + " or backend_endpoints in the config");
}

}  // namespace

std::shared_ptr<EncoderBackend> make_backend(const std::string& backend_id,
                                             const RunConfig& config) {
    if (backend_id == "mock") {
        MockBackendConfig mock;
        mock.seed = config.seed;
        return std::make_shared<MockBackend>(mock);
    }
    if (backend_id == "msclap2022")
        return std::make_shared<HttpBackend>(HttpBackendConfig{
            backend_id, endpoint_for(backend_id, config, "TSPE_MSCLAP22_ENDPOINT")});
    if (backend_id == "msclap2023")
        return std::make_shared<HttpBackend>(HttpBackendConfig{
            backend_id, endpoint_for(backend_id, config, "TSPE_MSCLAP23_ENDPOINT")});
    throw ConfigError("unknown backend '" + backend_id +
                      "' (known: mock, msclap2022, msclap2023)");
}

}  // namespace tspe
