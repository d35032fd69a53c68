#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tspe/categories.hpp"
#include "tspe/grammar.hpp"

namespace tspe {

enum class RuleScope { AttributeLabel, SourceLabel };
enum class RuleVerdict { Allow, Deny };

// One attribute–category or source–category compatibility judgement.
// Deny rules outrank Allow rules for the same (scope, category, term).
struct CompatibilityRule {
    RuleScope scope = RuleScope::AttributeLabel;
    CategoryId category = CategoryId::MusicalInstruments;
    std::string term;
    RuleVerdict verdict = RuleVerdict::Deny;
    std::string rationale;
};

struct CompatibilityCheck {
    RuleVerdict verdict = RuleVerdict::Allow;
    std::vector<CompatibilityRule> violated;  // matching Deny rules, with rationales
};

class RuleTable {
public:
    RuleTable() = default;
    explicit RuleTable(std::vector<CompatibilityRule> rules);

    static RuleTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    const std::vector<CompatibilityRule>& rules() const { return rules_; }

private:
    std::vector<CompatibilityRule> rules_;
};

// Deny iff any Deny rule matches the candidate's attribute or source within
// its category; Allow otherwise (vacuously on an empty table).
CompatibilityCheck check_compatibility(const PromptCandidate& candidate, const RuleTable& rules);

// The curated per-category prompt list shipped to evaluation.
struct PromptSet {
    CategoryId category = CategoryId::MusicalInstruments;
    int k = 0;
    std::vector<PromptCandidate> prompts;
    std::string created_from;  // content hash of the candidate file reviewed
    std::string reviewer;
    std::string created_at;
};

enum class CurationMode { Interactive, Auto };

struct CurationOptions {
    int k = 20;
    CurationMode mode = CurationMode::Auto;
    std::string reviewer = "auto";
    std::string created_from;
    // Interactive mode reads y/n/q decisions from `input` and shows each
    // surviving candidate with its rule verdict on `output`.
    std::istream* input = nullptr;
    std::ostream* output = nullptr;
    std::ostream* transcript = nullptr;
};

// Filters candidates through the Deny rules, then selects K prompts: the
// first K survivors in auto mode, reviewer-accepted ones in interactive
// mode. Throws InsufficientCandidates when fewer than K can be selected and
// CurationAborted when the reviewer quits.
PromptSet curate(const std::vector<PromptCandidate>& candidates, const RuleTable& rules,
                 const CurationOptions& options);

// Single-prompt set holding the baseline template, used by the reduction
// checks (an ensemble over it equals the plain baseline condition).
PromptSet vanilla_promptset(CategoryId category);

void save_promptset(const std::filesystem::path& path, const PromptSet& set);
PromptSet load_promptset(const std::filesystem::path& path);

// Stable digest of (category, K, prompts); recorded by ensembles and reports.
std::string promptset_hash(const PromptSet& set);

}  // namespace tspe
