#include "tspe/encoder.hpp"

#include "tspe/cache.hpp"
#include "tspe/errors.hpp"
#include "tspe/hash.hpp"

namespace tspe {

std::string EncoderBackend::audio_fingerprint(const std::filesystem::path& clip) const {
    if (!std::filesystem::exists(clip))
        throw AudioDecodeError("clip not found: " + clip.string());
    return sha256_hex_file(clip);
}

Encoder::Encoder(std::shared_ptr<EncoderBackend> backend, std::filesystem::path cache_dir)
    : backend_(std::move(backend)), info_(backend_->info()) {
    if (info_.dimension == 0) throw BackendLoadError("backend declares dimension 0");
    std::filesystem::path text_path, audio_path;
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        text_path = cache_dir / (info_.backend_id + ".text.cache");
        audio_path = cache_dir / (info_.backend_id + ".audio.cache");
    }
    text_cache_ = std::make_unique<EmbeddingCache>(text_path, info_.backend_id, info_.dimension);
    audio_cache_ = std::make_unique<EmbeddingCache>(audio_path, info_.backend_id, info_.dimension);
}

Encoder::~Encoder() = default;

namespace {

// Fills `out` at the miss positions with normalized backend results.
template <typename Input, typename EncodeFn>
void fill_misses(const std::vector<Input>& inputs, const std::vector<std::string>& fingerprints,
                 std::vector<std::optional<Embedding>>& out, EmbeddingCache& cache,
                 std::size_t dimension, EncodeFn encode) {
    std::vector<Input> missing;
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!out[i]) {
            missing.push_back(inputs[i]);
            positions.push_back(i);
        }
    }
    if (missing.empty()) return;
    std::vector<Embedding> fresh = encode(missing);
    if (fresh.size() != missing.size())
        throw EncodeError("backend returned " + std::to_string(fresh.size()) +
                          " embeddings for " + std::to_string(missing.size()) + " inputs");
    for (std::size_t k = 0; k < fresh.size(); ++k) {
        if (fresh[k].dimension() != dimension)
            throw EncodeError("backend returned dimension " +
                              std::to_string(fresh[k].dimension()) + ", declared " +
                              std::to_string(dimension));
        Embedding unit = normalize(fresh[k]);
        cache.put(fingerprints[positions[k]], unit);
        out[positions[k]] = std::move(unit);
    }
}

}  // namespace

std::vector<Embedding> Encoder::embed_text(const std::vector<std::string>& texts) {
    if (!info_.text_capable)
        throw EncodeError("backend '" + info_.backend_id + "' cannot encode text");
    for (const std::string& t : texts)
        if (t.empty()) throw EncodeError("cannot embed an empty text");

    std::lock_guard lock(mutex_);
    std::vector<std::string> fingerprints;
    fingerprints.reserve(texts.size());
    for (const std::string& t : texts) fingerprints.push_back(sha256_hex(t));

    std::vector<std::optional<Embedding>> out(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) out[i] = text_cache_->get(fingerprints[i]);
    fill_misses(texts, fingerprints, out, *text_cache_, info_.dimension,
                [&](const std::vector<std::string>& missing) {
                    return backend_->encode_text(missing);
                });

    std::vector<Embedding> result;
    result.reserve(out.size());
    for (auto& e : out) result.push_back(std::move(*e));
    return result;
}

std::vector<Embedding> Encoder::embed_audio(const std::vector<std::filesystem::path>& clips) {
    if (!info_.audio_capable)
        throw EncodeError("backend '" + info_.backend_id + "' cannot encode audio");

    std::lock_guard lock(mutex_);
    std::vector<std::string> fingerprints;
    fingerprints.reserve(clips.size());
    for (const auto& clip : clips) fingerprints.push_back(backend_->audio_fingerprint(clip));

    std::vector<std::optional<Embedding>> out(clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) out[i] = audio_cache_->get(fingerprints[i]);
    fill_misses(clips, fingerprints, out, *audio_cache_, info_.dimension,
                [&](const std::vector<std::filesystem::path>& missing) {
                    return backend_->encode_audio(missing);
                });

    std::vector<Embedding> result;
    result.reserve(out.size());
    for (auto& e : out) result.push_back(std::move(*e));
    return result;
}

}  // namespace tspe
