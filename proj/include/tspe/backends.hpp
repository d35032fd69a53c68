#pragma once

#include <memory>
#include <string>

#include "tspe/config.hpp"
#include "tspe/encoder.hpp"

namespace tspe {

// Known encoder backend ids: "mock", "msclap2022", "msclap2023". The real
// checkpoints are served by a local embedding service; its endpoint comes
// from the config file or the TSPE_MSCLAP22_ENDPOINT/TSPE_MSCLAP23_ENDPOINT
// environment variables. Throws BackendUnavailable when no endpoint is
// configured and ConfigError for an unknown id.
std::shared_ptr<EncoderBackend> make_backend(const std::string& backend_id,
                                             const RunConfig& config);

}  // namespace tspe
