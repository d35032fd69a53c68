#include "tspe/curation.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "tspe/errors.hpp"
#include "tspe/hash.hpp"

namespace tspe {
namespace {

using nlohmann::json;

constexpr std::string_view kRulesFormat = "tspe-rules-v1";
constexpr std::string_view kPromptSetFormat = "tspe-promptset-v1";

std::string_view scope_name(RuleScope s) {
    return s == RuleScope::AttributeLabel ? "attribute_label" : "source_label";
}

RuleScope scope_from(const std::string& s, const std::string& where) {
    if (s == "attribute_label") return RuleScope::AttributeLabel;
    if (s == "source_label") return RuleScope::SourceLabel;
    throw ConfigError(where + ": unknown rule scope '" + s + "'");
}

std::string_view verdict_name(RuleVerdict v) {
    return v == RuleVerdict::Deny ? "deny" : "allow";
}

RuleVerdict verdict_from(const std::string& s, const std::string& where) {
    if (s == "deny") return RuleVerdict::Deny;
    if (s == "allow") return RuleVerdict::Allow;
    throw ConfigError(where + ": unknown rule verdict '" + s + "'");
}

void validate_rules(const std::vector<CompatibilityRule>& rules) {
    std::set<std::tuple<RuleScope, CategoryId, std::string>> keys;
    for (const CompatibilityRule& r : rules) {
        if (r.term.empty()) throw ConfigError("compatibility rule with empty term");
        if (!keys.insert({r.scope, r.category, r.term}).second)
            throw ConfigError("duplicate compatibility rule for term '" + r.term + "' (" +
                              std::string(scope_name(r.scope)) + ", " +
                              std::string(category_id_string(r.category)) + ")");
    }
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json rule_to_json(const CompatibilityRule& r) {
    return json{{"scope", scope_name(r.scope)},
                {"category", category_id_string(r.category)},
                {"term", r.term},
                {"verdict", verdict_name(r.verdict)},
                {"rationale", r.rationale}};
}

}  // namespace

RuleTable::RuleTable(std::vector<CompatibilityRule> rules) : rules_(std::move(rules)) {
    validate_rules(rules_);
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open rule table: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("rule table " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != kRulesFormat)
        throw ConfigError("rule table " + path.string() + ": unexpected format tag");
    std::vector<CompatibilityRule> rules;
    const std::string where = path.string();
    for (const json& rj : j.at("rules")) {
        CompatibilityRule r;
        r.scope = scope_from(rj.value("scope", ""), where);
        const auto cat = category_from_string(rj.value("category", ""));
        if (!cat) throw ConfigError(where + ": unknown category '" + rj.value("category", "") + "'");
        r.category = *cat;
        r.term = rj.value("term", "");
        r.verdict = verdict_from(rj.value("verdict", ""), where);
        r.rationale = rj.value("rationale", "");
        rules.push_back(std::move(r));
    }
    return RuleTable(std::move(rules));
}

void RuleTable::save(const std::filesystem::path& path) const {
    json j;
    j["format"] = kRulesFormat;
    j["rules"] = json::array();
    for (const CompatibilityRule& r : rules_) j["rules"].push_back(rule_to_json(r));
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write rule table: " + path.string());
    out << j.dump(2) << '\n';
}

CompatibilityCheck check_compatibility(const PromptCandidate& candidate, const RuleTable& rules) {
    CompatibilityCheck result;
    for (const CompatibilityRule& r : rules.rules()) {
        if (r.category != candidate.category || r.verdict != RuleVerdict::Deny) continue;
        const bool hits_attribute = r.scope == RuleScope::AttributeLabel &&
                                    candidate.attribute.has_value() &&
                                    *candidate.attribute == r.term;
        const bool hits_source = r.scope == RuleScope::SourceLabel &&
                                 candidate.source.has_value() && *candidate.source == r.term;
        if (hits_attribute || hits_source) result.violated.push_back(r);
    }
    result.verdict = result.violated.empty() ? RuleVerdict::Allow : RuleVerdict::Deny;
    return result;
}

namespace {

void log_line(const CurationOptions& options, const std::string& line) {
    if (options.transcript != nullptr) *options.transcript << line << '\n';
}

std::string denial_note(const CompatibilityCheck& check) {
    std::ostringstream out;
    out << "denied by";
    for (const CompatibilityRule& r : check.violated) {
        out << " [" << scope_name(r.scope) << " '" << r.term << "'";
        if (!r.rationale.empty()) out << ": " << r.rationale;
        out << "]";
    }
    return out.str();
}

}  // namespace

PromptSet curate(const std::vector<PromptCandidate>& candidates, const RuleTable& rules,
                 const CurationOptions& options) {
    if (options.k <= 0) throw UsageError("curate: K must be positive");
    if (!candidates.empty()) {
        const CategoryId category = candidates.front().category;
        for (const PromptCandidate& c : candidates)
            if (c.category != category)
                throw UsageError("curate: candidates span multiple categories");
    }

    std::vector<const PromptCandidate*> survivors;
    for (const PromptCandidate& c : candidates) {
        const CompatibilityCheck check = check_compatibility(c, rules);
        if (check.verdict == RuleVerdict::Deny) {
            log_line(options, "deny   " + c.pattern + "  -- " + denial_note(check));
        } else {
            survivors.push_back(&c);
        }
    }
    if (std::cmp_less(survivors.size(), options.k)) {
        std::ostringstream msg;
        msg << "only " << survivors.size() << " of " << candidates.size()
            << " candidates survive the deny rules; K=" << options.k;
        throw InsufficientCandidates(msg.str());
    }

    PromptSet set;
    set.category = candidates.front().category;
    set.k = options.k;
    set.created_from = options.created_from;
    set.reviewer = options.reviewer;
    set.created_at = timestamp_utc();

    if (options.mode == CurationMode::Auto) {
        for (const PromptCandidate* c : survivors) {
            if (std::cmp_equal(set.prompts.size(), options.k)) break;
            set.prompts.push_back(*c);
            log_line(options, "accept " + c->pattern);
        }
        return set;
    }

    if (options.input == nullptr || options.output == nullptr)
        throw UsageError("curate: interactive mode needs input and output streams");
    std::istream& in = *options.input;
    std::ostream& out = *options.output;
    std::size_t shown = 0;
    for (const PromptCandidate* c : survivors) {
        if (std::cmp_equal(set.prompts.size(), options.k)) break;
        ++shown;
        out << "[" << shown << "/" << survivors.size() << "] " << c->pattern
            << "  (rules: allow)\n";
        for (;;) {
            out << "accept? [y/n/q] " << std::flush;
            std::string answer;
            if (!std::getline(in, answer)) {
                log_line(options, "abort  input closed during review");
                throw CurationAborted("interactive review ended before K prompts were accepted");
            }
            answer.erase(0, answer.find_first_not_of(" \t"));
            if (!answer.empty()) answer = answer.substr(0, 1);
            if (answer == "y" || answer == "Y") {
                set.prompts.push_back(*c);
                log_line(options, "accept " + c->pattern);
                break;
            }
            if (answer == "n" || answer == "N") {
                log_line(options, "reject " + c->pattern);
                break;
            }
            if (answer == "q" || answer == "Q") {
                log_line(options, "abort  reviewer quit");
                throw CurationAborted("reviewer quit the curation session");
            }
            out << "please answer y, n or q\n";
        }
    }
    if (std::cmp_less(set.prompts.size(), options.k)) {
        std::ostringstream msg;
        msg << "review accepted " << set.prompts.size() << " prompts; K=" << options.k;
        throw InsufficientCandidates(msg.str());
    }
    return set;
}

PromptSet vanilla_promptset(CategoryId category) {
    PromptSet set;
    set.category = category;
    set.k = 1;
    set.prompts.push_back(vanilla_candidate(category));
    set.reviewer = "baseline";
    set.created_at = "1970-01-01T00:00:00Z";
    return set;
}

void save_promptset(const std::filesystem::path& path, const PromptSet& set) {
    if (std::cmp_not_equal(set.prompts.size(), set.k))
        throw ConfigError("prompt set holds " + std::to_string(set.prompts.size()) +
                          " prompts but K=" + std::to_string(set.k));
    json j;
    j["format"] = kPromptSetFormat;
    j["category"] = category_id_string(set.category);
    j["k"] = set.k;
    j["created_from"] = set.created_from;
    j["reviewer"] = set.reviewer;
    j["created_at"] = set.created_at;
    j["prompts"] = set.prompts;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write prompt set: " + path.string());
    out << j.dump(2) << '\n';
}

PromptSet load_promptset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open prompt set: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("prompt set " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != kPromptSetFormat)
        throw ConfigError("prompt set " + path.string() + ": unexpected format tag");
    PromptSet set;
    const auto cat = category_from_string(j.value("category", ""));
    if (!cat)
        throw ConfigError("prompt set " + path.string() + ": unknown category '" +
                          j.value("category", "") + "'");
    set.category = *cat;
    set.k = j.value("k", 0);
    set.created_from = j.value("created_from", "");
    set.reviewer = j.value("reviewer", "");
    set.created_at = j.value("created_at", "");
    set.prompts = j.at("prompts").get<std::vector<PromptCandidate>>();
    if (std::cmp_not_equal(set.prompts.size(), set.k))
        throw ConfigError("prompt set " + path.string() + ": holds " +
                          std::to_string(set.prompts.size()) + " prompts but K=" +
                          std::to_string(set.k));
    for (const PromptCandidate& c : set.prompts) {
        if (c.category != set.category)
            throw ConfigError("prompt set " + path.string() +
                              ": prompt category differs from set category");
        if (!parse_prompt(c.pattern))
            throw ConfigError("prompt set " + path.string() + ": pattern does not parse: " +
                              c.pattern);
    }
    return set;
}

std::string promptset_hash(const PromptSet& set) {
    json j;
    j["category"] = category_id_string(set.category);
    j["k"] = set.k;
    j["prompts"] = set.prompts;
    return sha256_hex(j.dump());
}

}  // namespace tspe
