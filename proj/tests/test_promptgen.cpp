#include <deque>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tspe/errors.hpp"
#include "tspe/promptgen.hpp"

using namespace tspe;

namespace {

// Replays canned batches, one per driver round.
class ScriptedGenerator : public GeneratorBackend {
public:
    std::string name() const override { return "scripted"; }

    std::vector<std::string> propose_terms(const PoolRequest&) override { return next(); }
    std::vector<std::string> propose_prompts(const PromptRequest&) override { return next(); }

    std::deque<std::vector<std::string>> batches;
    int calls = 0;

private:
    std::vector<std::string> next() {
        ++calls;
        if (batches.empty()) return {};
        auto batch = std::move(batches.front());
        batches.pop_front();
        return batch;
    }
};

CategoryPools small_pools(CategoryId id) {
    CategoryPools pools;
    pools.category = id;
    pools.attributes = {"test.attributes", {"loud", "hushed", "gentle"}};
    pools.sources = {"test.sources", {"street", "opera"}};
    return pools;
}

std::vector<std::string> descriptions() {
    std::vector<std::string> out;
    for (CategoryId id : kAllCategories) out.push_back(category_info(id).description);
    return out;
}

}  // namespace

TEST_CASE("offline pool generation is a pure function of the seed") {
    OfflineGenerator g1(11), g2(11), g3(12);
    GenerationReport rep;
    const PoolPair a = generate_pools(descriptions(), g1, 30, 30, &rep);
    const PoolPair b = generate_pools(descriptions(), g2);
    CHECK(a.attributes.attributes == b.attributes.attributes);
    CHECK(a.sources.sources == b.sources.sources);
    CHECK(a.attributes.attributes.size() == 30);
    CHECK(a.sources.sources.size() == 30);
    CHECK(a.provenance == Provenance::Offline);
    CHECK(rep.requested == 60);
    CHECK(rep.accepted == 60);
    CHECK(rep.rejected_parse == 0);

    // Term selection is cursor-driven, so the same vocabulary prefix comes
    // back for any seed; prompt sampling is where seeds diverge.
    const PoolPair c = generate_pools(descriptions(), g3);
    CHECK(c.attributes.attributes == a.attributes.attributes);
}

TEST_CASE("offline candidate generation is deterministic per seed") {
    const TaskCategory& cat = category_info(CategoryId::AcousticScene);
    const CategoryPools pools = small_pools(CategoryId::AcousticScene);

    OfflineGenerator g1(5), g2(5), g3(6);
    const auto a = generate_candidates(cat, pools, 11, g1);
    const auto b = generate_candidates(cat, pools, 11, g2);
    const auto c = generate_candidates(cat, pools, 11, g3);
    CHECK(a == b);
    CHECK(a != c);

    REQUIRE(a.size() == 11);  // 3 + 2 + 3*2 combos available
    std::set<std::string> patterns;
    const std::set<std::string> attrs(pools.attributes.attributes.begin(),
                                      pools.attributes.attributes.end());
    const std::set<std::string> srcs(pools.sources.sources.begin(),
                                     pools.sources.sources.end());
    for (const PromptCandidate& cand : a) {
        CHECK(cand.category == CategoryId::AcousticScene);
        CHECK(cand.provenance == Provenance::Offline);
        CHECK(patterns.insert(cand.pattern).second);
        const auto parsed = parse_prompt(cand.pattern);
        REQUIRE(parsed.has_value());
        CHECK(parsed->grammar == cand.grammar);
        if (cand.attribute) CHECK(attrs.count(*cand.attribute) == 1);
        if (cand.source) CHECK(srcs.count(*cand.source) == 1);
    }
}

TEST_CASE("offline generation exhausts once the vocabulary is consumed") {
    OfflineGenerator g(0);
    CHECK_THROWS_WITH_AS(generate_pools(descriptions(), g, 1000, 30),
                         doctest::Contains("rounds"), GenerationExhausted);

    // The combo space of a tiny pool caps unique candidates at 11.
    OfflineGenerator g2(0);
    const TaskCategory& cat = category_info(CategoryId::MusicGenre);
    CHECK_THROWS_AS(generate_candidates(cat, small_pools(CategoryId::MusicGenre), 12, g2),
                    GenerationExhausted);
}

TEST_CASE("term driver cleans markup, lowercases and retries") {
    ScriptedGenerator backend;
    backend.batches.push_back({"1. Loud", "- HUSHED", "\"abrupt\"", "gentle.", "loud",
                               "not a term because it mentions sound of things", ""});
    backend.batches.push_back({"* echoing;", "muffled"});
    backend.batches.push_back({"Street"});
    GenerationReport rep;
    const PoolPair pools = generate_pools({}, backend, 6, 1, &rep);
    CHECK(pools.attributes.attributes ==
          std::vector<std::string>{"loud", "hushed", "abrupt", "gentle", "echoing", "muffled"});
    CHECK(pools.sources.sources == std::vector<std::string>{"street"});
    CHECK(pools.provenance == Provenance::LLM);
    CHECK(rep.accepted == 7);
    CHECK(rep.duplicates_dropped == 1);          // second "loud"
    CHECK(rep.rejected_parse == 2);              // anchor phrase + empty line
    CHECK(rep.rounds == 3);                      // two attribute rounds, one source round
    CHECK(backend.calls == 3);
}

TEST_CASE("prompt driver enforces grammar, slot and pool membership") {
    const TaskCategory& cat = category_info(CategoryId::ImpactEmergency);
    CategoryPools pools = small_pools(CategoryId::ImpactEmergency);

    ScriptedGenerator backend;
    backend.batches.push_back({
        "- A loud sound of a <label> coming from a street.",  // markup stripped, accepted
        "This is the sound of a <label>",                     // baseline grammar: rejected
        "A loud sound of a siren coming from a street",       // concrete label: rejected
        "A deafening sound of a <label>",                     // attribute outside pool
        "The sound of a <label> coming from a cave",          // source outside pool
        "A loud sound of a <label> coming from a street",     // duplicate pattern
        "completely free-form text",
    });
    backend.batches.push_back({
        "\"The sound of a <label> coming from an opera\"",
        "A hushed sound of a <label>",
    });
    GenerationReport rep;
    const auto out = generate_candidates(cat, pools, 3, backend, &rep);
    REQUIRE(out.size() == 3);
    CHECK(out[0].pattern == "A loud sound of a <label> coming from a street");
    CHECK(out[0].grammar == Grammar::AttrSrc);
    CHECK(out[1].pattern == "The sound of a <label> coming from an opera");
    CHECK(out[1].grammar == Grammar::Src);
    CHECK(out[1].attribute == std::nullopt);
    CHECK(out[2].grammar == Grammar::Attr);
    for (const auto& c : out) CHECK(c.provenance == Provenance::LLM);

    CHECK(rep.requested == 3);
    CHECK(rep.accepted == 3);
    CHECK(rep.rejected_parse == 3);
    CHECK(rep.rejected_pool == 2);
    CHECK(rep.duplicates_dropped == 1);
    CHECK(rep.rounds == 2);

    ScriptedGenerator empty;
    CHECK_THROWS_AS(generate_candidates(cat, pools, 1, empty), GenerationExhausted);
    CHECK(empty.calls == kGenerationRetryRounds);

    pools.category = CategoryId::MusicGenre;
    ScriptedGenerator mismatched;
    CHECK_THROWS_AS(generate_candidates(cat, pools, 1, mismatched), UsageError);
}

TEST_CASE("candidate files round-trip and reject tampered headers") {
    tspe_test::TempDir tmp;
    OfflineGenerator g(3);
    CandidateFile file;
    file.category = CategoryId::NonVerbalVocal;
    file.backend = g.name();
    file.seed = 3;
    file.candidates = generate_candidates(category_info(CategoryId::NonVerbalVocal),
                                          small_pools(CategoryId::NonVerbalVocal), 8, g,
                                          &file.report);

    const auto path = tmp.path() / "cands.json";
    save_candidates(path, file);
    const CandidateFile back = load_candidates(path);
    CHECK(back.category == file.category);
    CHECK(back.backend == "offline");
    CHECK(back.seed == 3);
    CHECK(back.candidates == file.candidates);
    CHECK(back.report.accepted == file.report.accepted);

    auto j = nlohmann::json::parse(tspe_test::read_file(path));
    j["category"] = "MusicGenre";  // header no longer matches the entries
    tspe_test::write_file(path, j.dump());
    CHECK_THROWS_AS(load_candidates(path), ConfigError);

    CHECK_THROWS_AS(load_candidates(tmp.path() / "absent.json"), ConfigError);
}

TEST_CASE("shipped candidate files hold forty validated entries per category") {
    const PoolRegistry registry = PoolRegistry::load(tspe_test::data_dir() /
                                                     "category_pools.json");
    for (CategoryId id : kAllCategories) {
        const auto path = tspe_test::data_dir() / "candidates" /
                          (std::string(category_id_string(id)) + ".json");
        const CandidateFile file = load_candidates(path);
        CHECK(file.category == id);
        REQUIRE(file.candidates.size() == 40);
        const CategoryPools& pools = registry.for_category(id);
        const std::set<std::string> attrs(pools.attributes.attributes.begin(),
                                          pools.attributes.attributes.end());
        const std::set<std::string> srcs(pools.sources.sources.begin(),
                                         pools.sources.sources.end());
        std::set<std::string> seen;
        for (const PromptCandidate& c : file.candidates) {
            CHECK(seen.insert(c.pattern).second);
            if (c.attribute) CHECK(attrs.count(*c.attribute) == 1);
            if (c.source) CHECK(srcs.count(*c.source) == 1);
        }
    }
}
