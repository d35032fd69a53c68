#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "tspe/curation.hpp"
#include "tspe/ensemble.hpp"
#include "tspe/errors.hpp"
#include "tspe/mock_backend.hpp"

using namespace tspe;

namespace {

Embedding vec(std::vector<double> values) { return Embedding{std::move(values), false}; }

std::vector<Embedding> random_units(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Embedding> out;
    for (std::size_t i = 0; i < n; ++i) {
        Embedding e;
        e.values.resize(d);
        for (double& v : e.values) v = gauss(rng);
        out.push_back(normalize(e));
    }
    return out;
}

double max_abs_diff(const Embedding& a, const Embedding& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

}  // namespace

TEST_CASE("an ensemble of one is the vector itself") {
    std::mt19937_64 rng(1);
    for (const Embedding& u : random_units(rng, 20, 12)) {
        CHECK(max_abs_diff(ensemble_vectors({u}), u) <= 1e-12);
    }
    // Unnormalized single input: only the direction survives.
    const Embedding scaled = vec({6.0, 8.0});
    CHECK(max_abs_diff(ensemble_vectors({scaled}), normalize(scaled)) <= 1e-12);
}

TEST_CASE("duplicated inputs do not move the mean") {
    std::mt19937_64 rng(2);
    const auto units = random_units(rng, 1, 10);
    const Embedding u = units[0];
    CHECK(max_abs_diff(ensemble_vectors({u, u, u, u}), u) <= 1e-12);
}

TEST_CASE("degenerate means are an error, not a NaN") {
    const Embedding plus = normalize(vec({1.0, 0.0}));
    const Embedding minus = normalize(vec({-1.0, 0.0}));
    CHECK_THROWS_AS(ensemble_vectors({plus, minus}), ZeroVector);
    CHECK_THROWS_AS(ensemble_vectors({}), UsageError);
    CHECK_THROWS_AS(ensemble_vectors({vec({1, 0}), vec({1, 0, 0})}), DimensionMismatch);
}

TEST_CASE("both averaging orders agree on unit inputs") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto units = random_units(rng, 7, 16);
        const Embedding a = ensemble_vectors(units, AveragingOrder::NormalizeThenAverage);
        const Embedding b = ensemble_vectors(units, AveragingOrder::AverageRawThenNormalize);
        CHECK(max_abs_diff(a, b) <= 1e-12);
    }
    // They diverge once magnitudes differ: the raw order weights by length.
    const Embedding long_x = vec({10.0, 0.0});
    const Embedding unit_y = vec({0.0, 1.0});
    const Embedding norm_first =
        ensemble_vectors({long_x, unit_y}, AveragingOrder::NormalizeThenAverage);
    const Embedding raw_first =
        ensemble_vectors({long_x, unit_y}, AveragingOrder::AverageRawThenNormalize);
    CHECK(std::abs(norm_first.values[0] - norm_first.values[1]) < 1e-12);
    CHECK(raw_first.values[0] > 0.9);  // dominated by the long vector
}

TEST_CASE("scaling any input leaves the default ensemble unchanged") {
    std::mt19937_64 rng(4);
    auto units = random_units(rng, 5, 8);
    const Embedding base = ensemble_vectors(units);
    for (double& v : units[2].values) v *= 37.5;
    CHECK(max_abs_diff(ensemble_vectors(units), base) <= 1e-12);
}

TEST_CASE("the ensemble stays inside the cone of its inputs") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        // A tight bundle: a pivot plus small perturbations, all unit length.
        const Embedding pivot = random_units(rng, 1, 10)[0];
        std::vector<Embedding> bundle;
        std::normal_distribution<double> gauss(0.0, 0.05);
        for (int i = 0; i < 6; ++i) {
            Embedding e = pivot;
            for (double& v : e.values) v += gauss(rng);
            bundle.push_back(normalize(e));
        }
        const Embedding center = ensemble_vectors(bundle);
        double worst_pairwise = 1.0;
        for (const auto& a : bundle)
            for (const auto& b : bundle) worst_pairwise = std::min(worst_pairwise, cosine(a, b));
        for (const auto& e : bundle) {
            // The mean direction is at least as close to every member as the
            // farthest pair of members is to each other.
            CHECK(cosine(center, e) >= worst_pairwise - 1e-9);
        }
    }
}

TEST_CASE("classification is argmax cosine with stable tie-breaking") {
    auto mk = [](const std::string& id, std::vector<double> v) {
        ClassEnsemble e;
        e.label_id = id;
        e.vector = normalize(vec(std::move(v)));
        e.k_used = 1;
        return e;
    };
    const std::vector<ClassEnsemble> ensembles = {
        mk("north", {0.0, 1.0}),
        mk("east", {1.0, 0.0}),
        mk("northeast", {1.0, 1.0}),
    };

    auto [label, scores] = classify(normalize(vec({0.9, 1.0})), ensembles);
    CHECK(label == "northeast");
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].label_id == "north");  // scores follow the class order given
    CHECK(scores[1].cosine == doctest::Approx(cosine(vec({0.9, 1.0}), vec({1.0, 0.0}))));

    // Exactly between north and east: both score cos(45°); the earlier
    // class wins.
    auto [tie_label, tie_scores] = classify(normalize(vec({1.0, 1.0})),
                                            {ensembles[0], ensembles[1]});
    CHECK(tie_scores[0].cosine == doctest::Approx(tie_scores[1].cosine));
    CHECK(tie_label == "north");

    CHECK_THROWS_AS(classify(vec({1.0, 0.0}), {}), UsageError);
    CHECK_THROWS_AS(classify(vec({1.0, 0.0, 0.0}), ensembles), DimensionMismatch);
}

TEST_CASE("classify agrees with a brute-force oracle over random instances") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> n_classes(1, 6), dims(2, 16);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = n_classes(rng), d = dims(rng);
        std::vector<ClassEnsemble> ensembles;
        for (std::size_t i = 0; i < n; ++i) {
            ClassEnsemble e;
            e.label_id = "class" + std::to_string(i);
            e.vector = random_units(rng, 1, d)[0];
            ensembles.push_back(std::move(e));
        }
        const Embedding audio = random_units(rng, 1, d)[0];

        std::size_t expected = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (cosine(audio, ensembles[i].vector) >
                cosine(audio, ensembles[expected].vector))
                expected = i;
        }
        const auto [label, scores] = classify(audio, ensembles);
        CHECK(label == ensembles[expected].label_id);
        REQUIRE(scores.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(scores[i].cosine == cosine(audio, ensembles[i].vector));
    }
}

TEST_CASE("class ensembles render, embed and stamp their provenance") {
    tspe_test::PlantedFixture fixture;
    Encoder encoder(fixture.backend());

    CurationOptions options;
    options.k = 3;
    std::vector<PromptCandidate> candidates;
    for (const char* a : {"soft", "clear", "warm"})
        candidates.push_back(make_candidate(CategoryId::NonVerbalVocal, Grammar::Attr, a,
                                            std::nullopt, Provenance::Offline));
    const PromptSet set = curate(candidates, RuleTable{}, options);

    const ClassEnsemble e = ensemble_class(set, "laughter", "laughter", encoder);
    CHECK(e.label_id == "laughter");
    CHECK(e.k_used == 3);
    CHECK(e.promptset_hash == promptset_hash(set));
    CHECK(std::abs(l2_norm(e.vector) - 1.0) < 1e-12);

    // Every rendered prompt names the planted class, so the ensemble sits
    // near its axis and classification picks it.
    const Embedding manual = ensemble_vectors(encoder.embed_text(
        {"A soft sound of laughter", "A clear sound of laughter", "A warm sound of laughter"}));
    CHECK(max_abs_diff(e.vector, manual) == 0.0);  // same cache entries, same math

    PromptSet empty;
    empty.category = CategoryId::NonVerbalVocal;
    CHECK_THROWS_AS(ensemble_class(empty, "x", "x", encoder), UsageError);
}

TEST_CASE("the baseline condition is an ensemble of one per class") {
    tspe_test::PlantedFixture fixture;
    Encoder encoder(fixture.backend());
    std::vector<std::pair<std::string, std::string>> labels;
    for (const std::string& l : fixture.labels) labels.emplace_back(l, l);

    const auto ensembles = vanilla_ensembles(labels, encoder);
    REQUIRE(ensembles.size() == labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        CHECK(ensembles[i].label_id == labels[i].first);
        CHECK(ensembles[i].k_used == 1);
        const Embedding direct = encoder.embed_text({vanilla_prompt(labels[i].second)})[0];
        CHECK(max_abs_diff(ensembles[i].vector, direct) <= 1e-12);
    }

    // classify_vanilla is exactly classify over those ensembles.
    const Embedding audio = encoder.embed_text({"the sound of a sigh"})[0];
    const auto via_helper = classify_vanilla(audio, labels, encoder);
    const auto direct = classify(audio, ensembles);
    CHECK(via_helper.first == direct.first);
    REQUIRE(via_helper.second.size() == direct.second.size());
    for (std::size_t i = 0; i < direct.second.size(); ++i)
        CHECK(via_helper.second[i].cosine == direct.second[i].cosine);
    CHECK(via_helper.first == "sigh");
}
