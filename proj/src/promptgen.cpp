#include "tspe/promptgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "tspe/articles.hpp"
#include "tspe/errors.hpp"

namespace tspe {
namespace {

using nlohmann::json;

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Strips list markup a text generator tends to wrap lines in: bullets,
// numbering, surrounding quotes, trailing punctuation.
std::string clean_line(std::string_view raw) {
    std::string s(raw);
    auto trim = [](std::string& t) {
        const char* ws = " \t\r\n";
        auto b = t.find_first_not_of(ws);
        auto e = t.find_last_not_of(ws);
        t = (b == std::string::npos) ? std::string() : t.substr(b, e - b + 1);
    };
    trim(s);
    if (!s.empty() && (s[0] == '-' || s[0] == '*')) {
        s.erase(0, 1);
        trim(s);
    }
    std::size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) {
        s.erase(0, digits + 1);
        trim(s);
    }
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        s = s.substr(1, s.size() - 2);
        trim(s);
    }
    while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) {
        s.pop_back();
        trim(s);
    }
    return s;
}

}  // namespace

OfflineGenerator::OfflineGenerator(std::uint64_t seed) : seed_(seed), rng_(seed) {}

std::vector<std::string> OfflineGenerator::propose_terms(const PoolRequest& request) {
    const auto vocab = request.kind == TermKind::Attributes ? builtin_attribute_vocabulary()
                                                            : builtin_source_vocabulary();
    std::size_t& cursor =
        request.kind == TermKind::Attributes ? attribute_cursor_ : source_cursor_;
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(std::max(request.count, 0)));
    for (int i = 0; i < request.count; ++i) {
        out.emplace_back(vocab[cursor % vocab.size()]);
        ++cursor;
    }
    return out;
}

std::vector<std::string> OfflineGenerator::propose_prompts(const PromptRequest& request) {
    if (request.category == nullptr || request.pools == nullptr)
        throw UsageError("propose_prompts: category and pools must be set");
    const auto& attrs = request.pools->attributes.attributes;
    const auto& srcs = request.pools->sources.sources;
    // Enumerate the grammar cross product: (attr), (src), (attr, src).
    struct Combo {
        Grammar grammar;
        std::size_t a, s;
    };
    std::vector<Combo> combos;
    combos.reserve(attrs.size() + srcs.size() + attrs.size() * srcs.size());
    for (std::size_t a = 0; a < attrs.size(); ++a) combos.push_back({Grammar::Attr, a, 0});
    for (std::size_t s = 0; s < srcs.size(); ++s) combos.push_back({Grammar::Src, 0, s});
    for (std::size_t a = 0; a < attrs.size(); ++a)
        for (std::size_t s = 0; s < srcs.size(); ++s) combos.push_back({Grammar::AttrSrc, a, s});
    if (combos.empty()) return {};
    std::shuffle(combos.begin(), combos.end(), rng_);

    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(std::max(request.count, 0)));
    for (int i = 0; i < request.count; ++i) {
        const Combo& c = combos[static_cast<std::size_t>(i) % combos.size()];
        std::optional<std::string> attribute, source;
        if (c.grammar != Grammar::Src) attribute = attrs[c.a];
        if (c.grammar != Grammar::Attr) source = srcs[c.s];
        out.push_back(make_candidate(request.category->id, c.grammar, std::move(attribute),
                                     std::move(source), Provenance::Offline)
                          .pattern);
    }
    return out;
}

PoolPair generate_pools(const std::vector<std::string>& category_descriptions,
                        GeneratorBackend& backend, int n_attributes, int n_sources,
                        GenerationReport* report) {
    if (n_attributes < 0 || n_sources < 0)
        throw UsageError("generate_pools: pool sizes must be non-negative");
    GenerationReport rep;
    rep.requested = n_attributes + n_sources;

    auto fill = [&](TermKind kind, int want, std::vector<std::string>& out) {
        std::set<std::string> seen;
        for (int round = 0; round < kGenerationRetryRounds && std::cmp_less(out.size(), want);
             ++round) {
            rep.rounds++;
            PoolRequest req{kind, want - static_cast<int>(out.size()), category_descriptions};
            for (const std::string& raw : backend.propose_terms(req)) {
                std::string term = lowercase(clean_line(raw));
                if (!is_single_phrase(term)) {
                    rep.rejected_parse++;
                    continue;
                }
                if (!seen.insert(term).second) {
                    rep.duplicates_dropped++;
                    continue;
                }
                out.push_back(std::move(term));
                rep.accepted++;
                if (std::cmp_equal(out.size(), want)) break;
            }
        }
        if (std::cmp_less(out.size(), want)) {
            std::ostringstream msg;
            msg << "pool generation stalled after " << kGenerationRetryRounds << " rounds: "
                << out.size() << "/" << want
                << (kind == TermKind::Attributes ? " attributes" : " sources") << " from backend '"
                << backend.name() << "'";
            throw GenerationExhausted(msg.str());
        }
    };

    PoolPair pools;
    pools.attributes.pool_id = "global.attributes";
    pools.sources.pool_id = "global.sources";
    fill(TermKind::Attributes, n_attributes, pools.attributes.attributes);
    fill(TermKind::Sources, n_sources, pools.sources.sources);
    validate_pool_entries(pools.attributes.pool_id, pools.attributes.attributes);
    validate_pool_entries(pools.sources.pool_id, pools.sources.sources);
    pools.provenance = backend.name() == "offline" ? Provenance::Offline : Provenance::LLM;
    if (report != nullptr) *report = rep;
    return pools;
}

std::vector<PromptCandidate> generate_candidates(const TaskCategory& category,
                                                 const CategoryPools& pools, int n,
                                                 GeneratorBackend& backend,
                                                 GenerationReport* report) {
    if (n < 0) throw UsageError("generate_candidates: count must be non-negative");
    if (pools.category != category.id)
        throw UsageError("generate_candidates: pools belong to a different category");
    const Provenance provenance =
        backend.name() == "offline" ? Provenance::Offline : Provenance::LLM;
    const std::set<std::string> attr_pool(pools.attributes.attributes.begin(),
                                          pools.attributes.attributes.end());
    const std::set<std::string> src_pool(pools.sources.sources.begin(),
                                         pools.sources.sources.end());

    GenerationReport rep;
    rep.requested = n;
    std::vector<PromptCandidate> out;
    std::set<std::string> seen_patterns;
    for (int round = 0; round < kGenerationRetryRounds && std::cmp_less(out.size(), n); ++round) {
        rep.rounds++;
        PromptRequest req{&category, &pools, n - static_cast<int>(out.size())};
        for (const std::string& raw : backend.propose_prompts(req)) {
            const std::string line = clean_line(raw);
            const auto parsed = parse_prompt(line);
            // Only the three slotted grammars qualify; the baseline template
            // and free-form text are parse rejections here.
            if (!parsed || parsed->grammar == Grammar::Vanilla || parsed->label != kLabelSlot) {
                rep.rejected_parse++;
                continue;
            }
            if ((!parsed->attribute.empty() && !attr_pool.contains(parsed->attribute)) ||
                (!parsed->source.empty() && !src_pool.contains(parsed->source))) {
                rep.rejected_pool++;
                continue;
            }
            std::optional<std::string> attribute, source;
            if (!parsed->attribute.empty()) attribute = parsed->attribute;
            if (!parsed->source.empty()) source = parsed->source;
            PromptCandidate candidate = make_candidate(category.id, parsed->grammar,
                                                       std::move(attribute), std::move(source),
                                                       provenance);
            if (!seen_patterns.insert(candidate.pattern).second) {
                rep.duplicates_dropped++;
                continue;
            }
            out.push_back(std::move(candidate));
            rep.accepted++;
            if (std::cmp_equal(out.size(), n)) break;
        }
    }
    if (std::cmp_less(out.size(), n)) {
        std::ostringstream msg;
        msg << "candidate generation stalled after " << kGenerationRetryRounds << " rounds: "
            << out.size() << "/" << n << " for category '" << category.name << "' from backend '"
            << backend.name() << "'";
        throw GenerationExhausted(msg.str());
    }
    if (report != nullptr) *report = rep;
    return out;
}

namespace {

json report_to_json(const GenerationReport& r) {
    return json{{"requested", r.requested},
                {"rounds", r.rounds},
                {"accepted", r.accepted},
                {"rejected_parse", r.rejected_parse},
                {"rejected_pool", r.rejected_pool},
                {"duplicates_dropped", r.duplicates_dropped}};
}

GenerationReport report_from_json(const json& j) {
    GenerationReport r;
    r.requested = j.value("requested", 0);
    r.rounds = j.value("rounds", 0);
    r.accepted = j.value("accepted", 0);
    r.rejected_parse = j.value("rejected_parse", 0);
    r.rejected_pool = j.value("rejected_pool", 0);
    r.duplicates_dropped = j.value("duplicates_dropped", 0);
    return r;
}

constexpr std::string_view kCandidateFormat = "tspe-candidates-v1";

}  // namespace

void save_candidates(const std::filesystem::path& path, const CandidateFile& file) {
    json j;
    j["format"] = kCandidateFormat;
    j["category"] = category_id_string(file.category);
    j["backend"] = file.backend;
    j["seed"] = file.seed;
    j["report"] = report_to_json(file.report);
    j["candidates"] = file.candidates;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write candidate file: " + path.string());
    out << j.dump(2) << '\n';
}

CandidateFile load_candidates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open candidate file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("candidate file " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != kCandidateFormat)
        throw ConfigError("candidate file " + path.string() + ": unexpected format tag");
    CandidateFile file;
    const auto cat = category_from_string(j.value("category", ""));
    if (!cat)
        throw ConfigError("candidate file " + path.string() + ": unknown category '" +
                          j.value("category", "") + "'");
    file.category = *cat;
    file.backend = j.value("backend", "");
    file.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("report")) file.report = report_from_json(j.at("report"));
    file.candidates = j.at("candidates").get<std::vector<PromptCandidate>>();
    for (const PromptCandidate& c : file.candidates)
        if (c.category != file.category)
            throw ConfigError("candidate file " + path.string() +
                              ": candidate category differs from file header");
    return file;
}

}  // namespace tspe
