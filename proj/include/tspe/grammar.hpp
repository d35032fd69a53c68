#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tspe/categories.hpp"

namespace tspe {

// The three task-specific prompt grammars, plus the generic baseline
// template. Generators emit only the first three; Vanilla exists so a
// prompt set can hold the baseline template (the reduction condition).
enum class Grammar { Attr, Src, AttrSrc, Vanilla };

enum class Provenance { LLM, Offline };

inline constexpr std::string_view kLabelSlot = "<label>";

std::string_view grammar_name(Grammar g);
std::optional<Grammar> grammar_from_name(std::string_view s);
std::string_view provenance_name(Provenance p);
std::optional<Provenance> provenance_from_name(std::string_view s);

// A prompt with attribute/source bound and the label slot free.
// `pattern` keeps the canonical "a <label>" slot; render() adjusts the
// article when the label is substituted.
struct PromptCandidate {
    CategoryId category = CategoryId::MusicalInstruments;
    Grammar grammar = Grammar::Attr;
    std::optional<std::string> attribute;
    std::optional<std::string> source;
    std::string pattern;
    Provenance provenance = Provenance::Offline;

    bool operator==(const PromptCandidate&) const = default;
};

struct ParsedPrompt {
    Grammar grammar = Grammar::Attr;
    std::string attribute;  // empty when the grammar has no attribute slot
    std::string label;      // "<label>" when parsed from an unrendered pattern
    std::string source;     // empty when the grammar has no source slot
};

// Structural parse of a prompt line, rendered or not. Returns nullopt when
// the text matches none of the grammars.
std::optional<ParsedPrompt> parse_prompt(std::string_view text);

// Builds a candidate from grammar + bindings, baking articles for the bound
// slots into the pattern. Throws UsageError on a binding/grammar mismatch.
PromptCandidate make_candidate(CategoryId category, Grammar grammar,
                               std::optional<std::string> attribute,
                               std::optional<std::string> source,
                               Provenance provenance);

PromptCandidate vanilla_candidate(CategoryId category);

// Substitutes the label into the candidate's pattern with article
// adjustment. Throws UnboundSlot when a required binding is missing or the
// label is empty. The result contains no slot markers.
std::string render(const PromptCandidate& candidate, std::string_view label_text);

// "This is the sound of a <label>" with the article adjusted.
std::string vanilla_prompt(std::string_view label_text);

// True for pool terms: non-empty single phrase without slot markers,
// newlines or grammar anchor phrases.
bool is_single_phrase(std::string_view term);

void to_json(nlohmann::json& j, const PromptCandidate& c);
void from_json(const nlohmann::json& j, PromptCandidate& c);

}  // namespace tspe
