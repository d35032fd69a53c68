#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tspe/categories.hpp"
#include "tspe/grammar.hpp"
#include "tspe/pools.hpp"

namespace tspe {

enum class TermKind { Attributes, Sources };

struct PoolRequest {
    TermKind kind = TermKind::Attributes;
    int count = 0;
    std::vector<std::string> category_descriptions;
};

struct PromptRequest {
    const TaskCategory* category = nullptr;
    const CategoryPools* pools = nullptr;
    int count = 0;
};

// A source of raw generator output. Drivers validate every line and retry;
// backends only propose.
class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::string> propose_terms(const PoolRequest& request) = 0;
    virtual std::vector<std::string> propose_prompts(const PromptRequest& request) = 0;
};

// Deterministic generator over the built-in vocabulary and the grammar/pool
// cross product. Pure function of (seed, call sequence).
class OfflineGenerator : public GeneratorBackend {
public:
    explicit OfflineGenerator(std::uint64_t seed);

    std::string name() const override { return "offline"; }
    std::vector<std::string> propose_terms(const PoolRequest& request) override;
    std::vector<std::string> propose_prompts(const PromptRequest& request) override;

private:
    std::uint64_t seed_;
    std::size_t attribute_cursor_ = 0;
    std::size_t source_cursor_ = 0;
    std::mt19937_64 rng_;
};

struct GenerationReport {
    int requested = 0;
    int rounds = 0;
    int accepted = 0;
    int rejected_parse = 0;
    int rejected_pool = 0;
    int duplicates_dropped = 0;
};

inline constexpr int kGenerationRetryRounds = 5;

// Builds the global pools: n_attributes + n_sources unique single-phrase
// terms (default split 30/30, 60 total). Duplicates and malformed terms are
// dropped and regenerated; after kGenerationRetryRounds rounds without
// reaching the counts, throws GenerationExhausted.
PoolPair generate_pools(const std::vector<std::string>& category_descriptions,
                        GeneratorBackend& backend, int n_attributes = 30, int n_sources = 30,
                        GenerationReport* report = nullptr);

// Generates exactly n candidates for the category. Every accepted candidate
// parses into one of the three grammars and draws its attribute/source from
// the category pools; rejected lines are regenerated up to the retry cap.
std::vector<PromptCandidate> generate_candidates(const TaskCategory& category,
                                                 const CategoryPools& pools, int n,
                                                 GeneratorBackend& backend,
                                                 GenerationReport* report = nullptr);

struct CandidateFile {
    CategoryId category = CategoryId::MusicalInstruments;
    std::string backend;
    std::uint64_t seed = 0;
    GenerationReport report;
    std::vector<PromptCandidate> candidates;
};

void save_candidates(const std::filesystem::path& path, const CandidateFile& file);
CandidateFile load_candidates(const std::filesystem::path& path);

}  // namespace tspe
