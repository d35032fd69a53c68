#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tspe/encoder.hpp"

namespace tspe {

// Test encoder with no model behind it. Two modes:
//  - hash-seeded (default): every input maps to a unit vector that is a pure
//    function of (content, seed), reproducible across processes;
//  - planted: class i of `planted_labels` owns the orthogonal axis e_i.
//    Text mentioning the label embeds near e_i (axis plus text_noise-scaled
//    deterministic noise, renormalized); audio whose content mentions the
//    label embeds exactly e_i. Inputs mentioning no label fall back to
//    hash-seeded vectors. Planted matches are whole-word and the longest
//    mentioned label wins, so "subway station" beats "subway".
struct MockBackendConfig {
    std::uint64_t seed = 0;
    std::size_t dimension = 32;
    std::vector<std::string> planted_labels;
    double text_noise = 0.05;
};

class MockBackend : public EncoderBackend {
public:
    explicit MockBackend(MockBackendConfig config = {});

    BackendInfo info() const override;
    std::vector<Embedding> encode_text(const std::vector<std::string>& texts) override;
    std::vector<Embedding> encode_audio(const std::vector<std::filesystem::path>& clips) override;

private:
    Embedding hash_seeded(const std::string& modality, const std::string& content) const;
    Embedding embed_content(const std::string& modality, const std::string& content) const;

    MockBackendConfig config_;
};

}  // namespace tspe
