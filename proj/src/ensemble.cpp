#include "tspe/ensemble.hpp"

#include "tspe/errors.hpp"

namespace tspe {

Embedding ensemble_vectors(const std::vector<Embedding>& embeddings, AveragingOrder order) {
    if (embeddings.empty()) throw UsageError("ensemble over zero embeddings");
    const std::size_t d = embeddings.front().dimension();
    Embedding mean;
    mean.values.assign(d, 0.0);
    for (const Embedding& e : embeddings) {
        if (e.dimension() != d)
            throw DimensionMismatch("ensemble inputs mix dimensions " + std::to_string(d) +
                                    " and " + std::to_string(e.dimension()));
        if (order == AveragingOrder::NormalizeThenAverage) {
            const Embedding unit = normalize(e);
            for (std::size_t i = 0; i < d; ++i) mean.values[i] += unit.values[i];
        } else {
            for (std::size_t i = 0; i < d; ++i) mean.values[i] += e.values[i];
        }
    }
    for (double& v : mean.values) v /= static_cast<double>(embeddings.size());
    return normalize(mean);  // ZeroVector on a degenerate mean
}

ClassEnsemble ensemble_class(const PromptSet& promptset, const std::string& label_id,
                             const std::string& label_text, Encoder& encoder,
                             AveragingOrder order) {
    if (promptset.prompts.empty()) throw UsageError("ensemble over an empty prompt set");
    std::vector<std::string> rendered;
    rendered.reserve(promptset.prompts.size());
    for (const PromptCandidate& prompt : promptset.prompts)
        rendered.push_back(render(prompt, label_text));

    ClassEnsemble ensemble;
    ensemble.label_id = label_id;
    ensemble.vector = ensemble_vectors(encoder.embed_text(rendered), order);
    ensemble.k_used = static_cast<int>(promptset.prompts.size());
    ensemble.promptset_hash = promptset_hash(promptset);
    return ensemble;
}

std::pair<std::string, ScoreVector> classify(const Embedding& audio_embedding,
                                             const std::vector<ClassEnsemble>& ensembles) {
    if (ensembles.empty()) throw UsageError("classify with zero classes");
    ScoreVector scores;
    scores.reserve(ensembles.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < ensembles.size(); ++i) {
        const double c = cosine(audio_embedding, ensembles[i].vector);
        scores.push_back({ensembles[i].label_id, c});
        if (c > scores[best].cosine) best = i;  // strict: ties keep the lowest index
    }
    return {scores[best].label_id, std::move(scores)};
}

std::vector<ClassEnsemble> vanilla_ensembles(
    const std::vector<std::pair<std::string, std::string>>& labels, Encoder& encoder) {
    std::vector<std::string> prompts;
    prompts.reserve(labels.size());
    for (const auto& [label_id, text] : labels) prompts.push_back(vanilla_prompt(text));
    const std::vector<Embedding> embeddings = encoder.embed_text(prompts);

    std::vector<ClassEnsemble> ensembles;
    ensembles.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ClassEnsemble e;
        e.label_id = labels[i].first;
        e.vector = ensemble_vectors({embeddings[i]});
        e.k_used = 1;
        ensembles.push_back(std::move(e));
    }
    return ensembles;
}

std::pair<std::string, ScoreVector> classify_vanilla(
    const Embedding& audio_embedding,
    const std::vector<std::pair<std::string, std::string>>& labels, Encoder& encoder) {
    return classify(audio_embedding, vanilla_ensembles(labels, encoder));
}

}  // namespace tspe
