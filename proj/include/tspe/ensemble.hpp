#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tspe/curation.hpp"
#include "tspe/embedding.hpp"
#include "tspe/encoder.hpp"

namespace tspe {

// Both orders agree exactly when the inputs are unit vectors (the encoder
// contract); the raw order exists as a sensitivity check for vectors that
// arrive unnormalized.
enum class AveragingOrder { NormalizeThenAverage, AverageRawThenNormalize };

// One class's ensembled text representation.
struct ClassEnsemble {
    std::string label_id;
    Embedding vector;  // unit length
    int k_used = 0;
    std::string promptset_hash;
};

struct ScoreEntry {
    std::string label_id;
    double cosine = 0.0;
};

// One cosine per class, in the dataset's stable label order.
using ScoreVector = std::vector<ScoreEntry>;

// Renders every prompt in the set with the label text, embeds them, averages
// and renormalizes. Throws ZeroVector when the mean degenerates (norm <
// 1e-12).
ClassEnsemble ensemble_class(const PromptSet& promptset, const std::string& label_id,
                             const std::string& label_text, Encoder& encoder,
                             AveragingOrder order = AveragingOrder::NormalizeThenAverage);

// Pure vector form of the ensemble math, used by ensemble_class and the
// property tests.
Embedding ensemble_vectors(const std::vector<Embedding>& embeddings,
                           AveragingOrder order = AveragingOrder::NormalizeThenAverage);

// Argmax-cosine class for the audio embedding; ties break to the lowest
// index in `ensembles` (the dataset's stable label order).
std::pair<std::string, ScoreVector> classify(const Embedding& audio_embedding,
                                             const std::vector<ClassEnsemble>& ensembles);

// Baseline condition: each class is represented by the single generic
// template embedding (an ensemble of one).
std::pair<std::string, ScoreVector> classify_vanilla(
    const Embedding& audio_embedding,
    const std::vector<std::pair<std::string, std::string>>& labels,  // (label_id, display text)
    Encoder& encoder);

// The per-class representations classify_vanilla scores against.
std::vector<ClassEnsemble> vanilla_ensembles(
    const std::vector<std::pair<std::string, std::string>>& labels, Encoder& encoder);

}  // namespace tspe
