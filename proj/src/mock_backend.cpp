#include "tspe/mock_backend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "tspe/errors.hpp"
#include "tspe/hash.hpp"

namespace tspe {
namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool word_boundary(const std::string& text, std::size_t pos, std::size_t len) {
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    const bool left_ok = pos == 0 || !alnum(text[pos - 1]);
    const bool right_ok = pos + len == text.size() || !alnum(text[pos + len]);
    return left_ok && right_ok;
}

bool mentions_word(const std::string& text, const std::string& word) {
    if (word.empty()) return false;
    for (std::size_t pos = text.find(word); pos != std::string::npos;
         pos = text.find(word, pos + 1)) {
        if (word_boundary(text, pos, word.size())) return true;
    }
    return false;
}

// Index of the longest planted label mentioned in `text`, or npos.
std::size_t match_planted(const std::vector<std::string>& labels, const std::string& text) {
    std::size_t best = std::string::npos;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::string needle = lowercase(labels[i]);
        if (needle.size() > best_len && mentions_word(text, needle)) {
            best = i;
            best_len = needle.size();
        }
    }
    return best;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AudioDecodeError("cannot read clip: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

MockBackend::MockBackend(MockBackendConfig config) : config_(std::move(config)) {
    if (config_.dimension == 0) throw ConfigError("mock backend: dimension must be positive");
    if (config_.planted_labels.size() > config_.dimension)
        throw ConfigError("mock backend: " + std::to_string(config_.planted_labels.size()) +
                          " planted labels exceed dimension " +
                          std::to_string(config_.dimension));
    for (const std::string& l : config_.planted_labels)
        if (l.empty()) throw ConfigError("mock backend: planted label is empty");
}

BackendInfo MockBackend::info() const {
    BackendInfo info;
    info.backend_id = "mock";
    info.dimension = config_.dimension;
    info.text_capable = true;
    info.audio_capable = true;
    info.seed_sensitive = false;
    info.preprocessing = "none (synthetic clips read as bytes)";
    return info;
}

Embedding MockBackend::hash_seeded(const std::string& modality, const std::string& content) const {
    const std::string digest =
        sha256_hex(std::to_string(config_.seed) + ":" + modality + ":" + content);
    const std::uint64_t seed = std::stoull(digest.substr(0, 16), nullptr, 16);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Embedding e;
    e.values.resize(config_.dimension);
    for (double& v : e.values) v = gauss(rng);
    return e;
}

Embedding MockBackend::embed_content(const std::string& modality,
                                     const std::string& content) const {
    const std::string text = lowercase(content);
    const std::size_t planted = match_planted(config_.planted_labels, text);
    if (planted == std::string::npos) return hash_seeded(modality, content);

    Embedding axis;
    axis.values.assign(config_.dimension, 0.0);
    axis.values[planted] = 1.0;
    if (modality == "audio") return axis;  // audio sits exactly on its class axis

    Embedding noise = normalize(hash_seeded(modality, content));
    for (std::size_t i = 0; i < config_.dimension; ++i)
        axis.values[i] += config_.text_noise * noise.values[i];
    return axis;
}

std::vector<Embedding> MockBackend::encode_text(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(embed_content("text", t));
    return out;
}

std::vector<Embedding> MockBackend::encode_audio(
    const std::vector<std::filesystem::path>& clips) {
    std::vector<Embedding> out;
    out.reserve(clips.size());
    for (const auto& clip : clips) out.push_back(embed_content("audio", read_file(clip)));
    return out;
}

}  // namespace tspe
