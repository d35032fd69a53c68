#pragma once

#include <string>

#include "tspe/encoder.hpp"

namespace tspe {

// Adapter for a locally hosted embedding service wrapping a real
// audio-language checkpoint. Protocol:
//   GET  /info        -> {backend_id, dimension, sample_rate, text, audio,
//                         preprocessing}
//   POST /embed_text  -> {"texts": [...]}  => {"embeddings": [[...], ...]}
//   POST /embed_audio -> {"paths": [...]}  => {"embeddings": [[...], ...]}
// The service runs beside this process, so clips are passed by path.
struct HttpBackendConfig {
    std::string backend_id;  // expected id; /info must agree
    std::string endpoint;    // e.g. "http://127.0.0.1:9200"
    int timeout_s = 120;
};

class HttpBackend : public EncoderBackend {
public:
    // Probes /info; throws BackendLoadError when the service is unreachable
    // or serves a different model.
    explicit HttpBackend(HttpBackendConfig config);

    BackendInfo info() const override { return info_; }
    std::vector<Embedding> encode_text(const std::vector<std::string>& texts) override;
    std::vector<Embedding> encode_audio(const std::vector<std::filesystem::path>& clips) override;

private:
    std::vector<Embedding> post_embed(const std::string& path, const std::string& body,
                                      std::size_t expected);

    HttpBackendConfig config_;
    BackendInfo info_;
};

}  // namespace tspe
