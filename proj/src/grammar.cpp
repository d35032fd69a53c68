#include "tspe/grammar.hpp"

#include <algorithm>
#include <cctype>

#include "tspe/articles.hpp"
#include "tspe/errors.hpp"

namespace tspe {

namespace {

constexpr std::string_view kAttrTemplate = "A <attribute> sound of a <label>";
constexpr std::string_view kSrcTemplate = "The sound of a <label> coming from a <source>";
constexpr std::string_view kAttrSrcTemplate =
    "A <attribute> sound of a <label> coming from a <source>";
constexpr std::string_view kVanillaTemplate = "This is the sound of a <label>";

constexpr std::string_view kVanillaPrefix = "This is the sound of ";
constexpr std::string_view kSrcPrefix = "The sound of ";
constexpr std::string_view kSoundOf = " sound of ";
constexpr std::string_view kComingFrom = " coming from ";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_indefinite_article(std::string_view part) {
    if (part.substr(0, 3) == "an ") return part.substr(3);
    if (part.substr(0, 2) == "a ") return part.substr(2);
    return part;
}

bool has_marker(std::string_view s) {
    return s.find('<') != std::string_view::npos || s.find('>') != std::string_view::npos;
}

// Replaces "a <marker>" (or "A/an/An <marker>") with the value and its
// adjusted article. Zero-article values also consume the template article.
std::string bind_slot(const std::string& pattern, std::string_view marker,
                      std::string_view value) {
    const std::size_t pos = pattern.find(marker);
    if (pos == std::string::npos) {
        throw UnboundSlot("pattern has no " + std::string(marker) + " slot: " + pattern);
    }
    std::size_t article_start = pos;
    bool capitalized = false;
    if (pos >= 3 && (pattern.compare(pos - 3, 3, "an ") == 0 || pattern.compare(pos - 3, 3, "An ") == 0) &&
        (pos == 3 || pattern[pos - 4] == ' ')) {
        article_start = pos - 3;
        capitalized = pattern[pos - 3] == 'A';
    } else if (pos >= 2 && (pattern.compare(pos - 2, 2, "a ") == 0 || pattern.compare(pos - 2, 2, "A ") == 0) &&
               (pos == 2 || pattern[pos - 3] == ' ')) {
        article_start = pos - 2;
        capitalized = pattern[pos - 2] == 'A';
    }
    std::string out = pattern.substr(0, article_start);
    if (article_start == pos) {
        out += value;
    } else {
        out += with_article(value, capitalized);
    }
    out += pattern.substr(pos + marker.size());
    return out;
}

std::string_view base_template(Grammar g) {
    switch (g) {
        case Grammar::Attr: return kAttrTemplate;
        case Grammar::Src: return kSrcTemplate;
        case Grammar::AttrSrc: return kAttrSrcTemplate;
        case Grammar::Vanilla: return kVanillaTemplate;
    }
    return kVanillaTemplate;
}

bool valid_label_part(std::string_view part) {
    if (part.empty()) return false;
    if (part == "<label>") return true;
    return !has_marker(part);
}

bool valid_term_part(std::string_view part) {
    return !part.empty() && !has_marker(part);
}

}  // namespace

std::string_view grammar_name(Grammar g) {
    switch (g) {
        case Grammar::Attr: return "ATTR";
        case Grammar::Src: return "SRC";
        case Grammar::AttrSrc: return "ATTR_SRC";
        case Grammar::Vanilla: return "VANILLA";
    }
    return "";
}

std::optional<Grammar> grammar_from_name(std::string_view s) {
    if (s == "ATTR") return Grammar::Attr;
    if (s == "SRC") return Grammar::Src;
    if (s == "ATTR_SRC") return Grammar::AttrSrc;
    if (s == "VANILLA") return Grammar::Vanilla;
    return std::nullopt;
}

std::string_view provenance_name(Provenance p) {
    return p == Provenance::LLM ? "llm" : "offline";
}

std::optional<Provenance> provenance_from_name(std::string_view s) {
    if (s == "llm") return Provenance::LLM;
    if (s == "offline") return Provenance::Offline;
    return std::nullopt;
}

std::optional<ParsedPrompt> parse_prompt(std::string_view text) {
    const std::string_view s = trim(text);
    if (s.empty() || s.size() > 400) return std::nullopt;

    if (s.substr(0, kVanillaPrefix.size()) == kVanillaPrefix) {
        const std::string_view label = strip_indefinite_article(s.substr(kVanillaPrefix.size()));
        if (!valid_label_part(label)) return std::nullopt;
        if (label.find(kComingFrom) != std::string_view::npos) return std::nullopt;
        return ParsedPrompt{Grammar::Vanilla, "", std::string(label), ""};
    }

    if (s.substr(0, kSrcPrefix.size()) == kSrcPrefix) {
        const std::string_view rest = s.substr(kSrcPrefix.size());
        const std::size_t cut = rest.rfind(kComingFrom);
        if (cut == std::string_view::npos) return std::nullopt;
        const std::string_view label = strip_indefinite_article(rest.substr(0, cut));
        const std::string_view source =
            strip_indefinite_article(rest.substr(cut + kComingFrom.size()));
        if (!valid_label_part(label) || !valid_term_part(source)) return std::nullopt;
        return ParsedPrompt{Grammar::Src, "", std::string(label), std::string(source)};
    }

    std::string_view rest;
    if (s.substr(0, 3) == "An ") {
        rest = s.substr(3);
    } else if (s.substr(0, 2) == "A ") {
        rest = s.substr(2);
    } else {
        return std::nullopt;
    }

    const std::size_t attr_end = rest.find(kSoundOf);
    if (attr_end == std::string_view::npos || attr_end == 0) return std::nullopt;
    const std::string_view attribute = rest.substr(0, attr_end);
    if (!valid_term_part(attribute)) return std::nullopt;

    const std::string_view tail = rest.substr(attr_end + kSoundOf.size());
    const std::size_t cut = tail.rfind(kComingFrom);
    if (cut == std::string_view::npos) {
        const std::string_view label = strip_indefinite_article(tail);
        if (!valid_label_part(label)) return std::nullopt;
        return ParsedPrompt{Grammar::Attr, std::string(attribute), std::string(label), ""};
    }
    const std::string_view label = strip_indefinite_article(tail.substr(0, cut));
    const std::string_view source = strip_indefinite_article(tail.substr(cut + kComingFrom.size()));
    if (!valid_label_part(label) || !valid_term_part(source)) return std::nullopt;
    return ParsedPrompt{Grammar::AttrSrc, std::string(attribute), std::string(label),
                        std::string(source)};
}

PromptCandidate make_candidate(CategoryId category, Grammar grammar,
                               std::optional<std::string> attribute,
                               std::optional<std::string> source,
                               Provenance provenance) {
    const bool wants_attr = grammar == Grammar::Attr || grammar == Grammar::AttrSrc;
    const bool wants_src = grammar == Grammar::Src || grammar == Grammar::AttrSrc;
    if (wants_attr != attribute.has_value()) {
        throw UsageError(std::string(grammar_name(grammar)) +
                         (wants_attr ? " grammar requires an attribute"
                                     : " grammar takes no attribute"));
    }
    if (wants_src != source.has_value()) {
        throw UsageError(std::string(grammar_name(grammar)) +
                         (wants_src ? " grammar requires a source" : " grammar takes no source"));
    }
    if (attribute && !is_single_phrase(*attribute)) {
        throw UsageError("attribute is not a single phrase: '" + *attribute + "'");
    }
    if (source && !is_single_phrase(*source)) {
        throw UsageError("source is not a single phrase: '" + *source + "'");
    }

    PromptCandidate c;
    c.category = category;
    c.grammar = grammar;
    c.attribute = std::move(attribute);
    c.source = std::move(source);
    c.provenance = provenance;
    std::string pattern{base_template(grammar)};
    if (c.attribute) pattern = bind_slot(pattern, "<attribute>", *c.attribute);
    if (c.source) pattern = bind_slot(pattern, "<source>", *c.source);
    c.pattern = std::move(pattern);
    return c;
}

PromptCandidate vanilla_candidate(CategoryId category) {
    return make_candidate(category, Grammar::Vanilla, std::nullopt, std::nullopt,
                          Provenance::Offline);
}

std::string render(const PromptCandidate& candidate, std::string_view label_text) {
    if (candidate.pattern.find("<attribute>") != std::string::npos) {
        throw UnboundSlot("attribute binding missing in pattern: " + candidate.pattern);
    }
    if (candidate.pattern.find("<source>") != std::string::npos) {
        throw UnboundSlot("source binding missing in pattern: " + candidate.pattern);
    }
    const std::string label = normalize_label(label_text);
    if (label.empty()) {
        throw UnboundSlot("label text is empty");
    }
    std::string out = bind_slot(candidate.pattern, "<label>", label);
    if (has_marker(out)) {
        throw UnboundSlot("unresolved slot markers in rendered prompt: " + out);
    }
    return out;
}

std::string vanilla_prompt(std::string_view label_text) {
    return render(vanilla_candidate(CategoryId::AcousticScene), label_text);
}

bool is_single_phrase(std::string_view term) {
    const std::string_view t = trim(term);
    if (t.empty() || t.size() > 60 || t != term) return false;
    if (has_marker(t)) return false;
    if (t.find('\n') != std::string_view::npos || t.find('\t') != std::string_view::npos)
        return false;
    if (t.find(kSoundOf) != std::string_view::npos) return false;
    if (t.find(kComingFrom) != std::string_view::npos) return false;
    return true;
}

void to_json(nlohmann::json& j, const PromptCandidate& c) {
    j = nlohmann::json{
        {"category", std::string(category_id_string(c.category))},
        {"grammar", std::string(grammar_name(c.grammar))},
        {"pattern", c.pattern},
        {"provenance", std::string(provenance_name(c.provenance))},
    };
    if (c.attribute) j["attribute"] = *c.attribute;
    if (c.source) j["source"] = *c.source;
}

void from_json(const nlohmann::json& j, PromptCandidate& c) {
    const auto category = category_from_string(j.at("category").get<std::string>());
    if (!category) throw ConfigError("unknown category: " + j.at("category").dump());
    const auto grammar = grammar_from_name(j.at("grammar").get<std::string>());
    if (!grammar) throw ConfigError("unknown grammar: " + j.at("grammar").dump());
    const auto provenance = provenance_from_name(j.at("provenance").get<std::string>());
    if (!provenance) throw ConfigError("unknown provenance: " + j.at("provenance").dump());
    c.category = *category;
    c.grammar = *grammar;
    c.provenance = *provenance;
    c.pattern = j.at("pattern").get<std::string>();
    c.attribute = j.contains("attribute")
                      ? std::optional<std::string>(j.at("attribute").get<std::string>())
                      : std::nullopt;
    c.source = j.contains("source")
                   ? std::optional<std::string>(j.at("source").get<std::string>())
                   : std::nullopt;
}

}  // namespace tspe
