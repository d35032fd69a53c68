#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tspe/embedding.hpp"

namespace tspe {

struct BackendInfo {
    std::string backend_id;
    std::size_t dimension = 0;
    bool text_capable = false;
    bool audio_capable = false;
    // True when embeddings vary with the run seed; deterministic backends
    // produce five identical runs and the report records that.
    bool seed_sensitive = false;
    // Audio convention (sample rate, mixdown, clip policy) as declared by
    // the adapter; copied into the run config snapshot.
    std::string preprocessing;
};

// A dual encoder mapping text and audio into one embedding space. Adapters
// return raw vectors; the Encoder wrapper normalizes and caches them.
class EncoderBackend {
public:
    virtual ~EncoderBackend() = default;
    virtual BackendInfo info() const = 0;
    virtual std::vector<Embedding> encode_text(const std::vector<std::string>& texts) = 0;
    virtual std::vector<Embedding> encode_audio(
        const std::vector<std::filesystem::path>& clips) = 0;
    // Content identity of a clip for cache addressing; defaults to a digest
    // of the file bytes.
    virtual std::string audio_fingerprint(const std::filesystem::path& clip) const;
};

class EmbeddingCache;

// Public embedding entry point: content-addressed caching plus L2
// normalization at the boundary, so identical inputs always yield
// bit-identical unit vectors.
class Encoder {
public:
    // cache_dir empty → in-memory caching only.
    Encoder(std::shared_ptr<EncoderBackend> backend, std::filesystem::path cache_dir = {});
    ~Encoder();

    const BackendInfo& info() const { return info_; }

    std::vector<Embedding> embed_text(const std::vector<std::string>& texts);
    std::vector<Embedding> embed_audio(const std::vector<std::filesystem::path>& clips);

private:
    std::shared_ptr<EncoderBackend> backend_;
    BackendInfo info_;
    std::mutex mutex_;
    std::unique_ptr<EmbeddingCache> text_cache_;
    std::unique_ptr<EmbeddingCache> audio_cache_;
};

}  // namespace tspe
