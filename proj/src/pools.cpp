#include "tspe/pools.hpp"

#include <array>
#include <fstream>
#include <unordered_set>

#include "tspe/errors.hpp"

namespace tspe {

namespace {

constexpr std::array<std::string_view, 40> kAttributeVocabulary = {
    "loud",      "feeble",     "quiet",      "muted",      "faint",
    "melodious", "gentle",     "hushed",     "soft",       "sharp",
    "piercing",  "booming",    "rhythmic",   "soothing",   "harsh",
    "crisp",     "deep",       "thunderous", "mellow",     "resonant",
    "muffled",   "steady",     "sudden",     "distant",    "echoing",
    "vibrant",   "noisy",      "abrupt",     "raspy",      "whispering",
    "shrill",    "calm",       "droning",    "buzzing",    "high-pitched",
    "low-pitched", "blaring",  "clanging",   "humming",    "screeching",
};

constexpr std::array<std::string_view, 40> kSourceVocabulary = {
    "theater",         "concert",     "room",       "opera",      "street",
    "tunnel",          "church",      "university", "parking lot", "hall",
    "concert hall",    "road",        "library",    "zoo",        "airport",
    "railway station", "orchestra",   "studio",     "stadium",    "park",
    "market",          "subway",      "beach",      "kitchen",    "office",
    "cafe",            "restaurant",  "school",     "hospital",   "alley",
    "warehouse",       "factory",     "garage",     "rooftop",    "basement",
    "playground",      "harbor",      "temple",     "courtyard",  "bridge",
};

nlohmann::json pool_to_json(const std::string& pool_id, const std::vector<std::string>& entries) {
    return nlohmann::json{{"pool_id", pool_id}, {"entries", entries}};
}

std::pair<std::string, std::vector<std::string>> pool_from_json(const nlohmann::json& j) {
    return {j.at("pool_id").get<std::string>(),
            j.at("entries").get<std::vector<std::string>>()};
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open file: " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace

void validate_pool_entries(const std::string& pool_id, const std::vector<std::string>& entries) {
    if (entries.empty()) {
        throw ConfigError("pool '" + pool_id + "' is empty");
    }
    std::unordered_set<std::string> seen;
    for (const auto& entry : entries) {
        if (!is_single_phrase(entry)) {
            throw ConfigError("pool '" + pool_id + "' entry is not a single phrase: '" + entry +
                              "'");
        }
        if (!seen.insert(entry).second) {
            throw ConfigError("pool '" + pool_id + "' has duplicate entry: '" + entry + "'");
        }
    }
}

void save_pools(const std::filesystem::path& path, const PoolPair& pools) {
    validate_pool_entries(pools.attributes.pool_id, pools.attributes.attributes);
    validate_pool_entries(pools.sources.pool_id, pools.sources.sources);
    nlohmann::json j{
        {"format", "tspe-pools-v1"},
        {"split",
         {{"attributes", pools.attributes.attributes.size()},
          {"sources", pools.sources.sources.size()}}},
        {"provenance", std::string(provenance_name(pools.provenance))},
        {"seed", pools.seed},
        {"attributes", pool_to_json(pools.attributes.pool_id, pools.attributes.attributes)},
        {"sources", pool_to_json(pools.sources.pool_id, pools.sources.sources)},
    };
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write file: " + path.string());
    }
    out << j.dump(2) << "\n";
}

PoolPair load_pools(const std::filesystem::path& path) {
    const nlohmann::json j = load_json_file(path);
    try {
        if (j.at("format").get<std::string>() != "tspe-pools-v1") {
            throw ConfigError(path.string() + ": unexpected format field");
        }
        PoolPair pools;
        auto [attr_id, attrs] = pool_from_json(j.at("attributes"));
        auto [src_id, srcs] = pool_from_json(j.at("sources"));
        pools.attributes = AttributePool{std::move(attr_id), std::move(attrs)};
        pools.sources = SourcePool{std::move(src_id), std::move(srcs)};
        pools.seed = j.value("seed", 0ULL);
        const auto prov = provenance_from_name(j.value("provenance", "offline"));
        pools.provenance = prov.value_or(Provenance::Offline);
        validate_pool_entries(pools.attributes.pool_id, pools.attributes.attributes);
        validate_pool_entries(pools.sources.pool_id, pools.sources.sources);
        return pools;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

PoolRegistry PoolRegistry::load(const std::filesystem::path& path) {
    const nlohmann::json j = load_json_file(path);
    PoolRegistry registry;
    try {
        if (j.at("format").get<std::string>() != "tspe-category-pools-v1") {
            throw ConfigError(path.string() + ": unexpected format field");
        }
        for (const auto& [key, value] : j.at("categories").items()) {
            const auto id = category_from_string(key);
            if (!id) {
                throw ConfigError(path.string() + ": unknown category '" + key + "'");
            }
            const TaskCategory& info = category_info(*id);
            CategoryPools pools;
            pools.category = *id;
            pools.attributes.pool_id = info.attribute_pool_ref;
            pools.attributes.attributes = value.at("attributes").get<std::vector<std::string>>();
            pools.sources.pool_id = info.source_pool_ref;
            pools.sources.sources = value.at("sources").get<std::vector<std::string>>();
            validate_pool_entries(pools.attributes.pool_id, pools.attributes.attributes);
            validate_pool_entries(pools.sources.pool_id, pools.sources.sources);
            registry.by_category_.emplace(*id, std::move(pools));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return registry;
}

const CategoryPools& PoolRegistry::for_category(CategoryId id) const {
    const auto it = by_category_.find(id);
    if (it == by_category_.end()) {
        throw ConfigError("no pools configured for category '" +
                          std::string(category_id_string(id)) + "'");
    }
    return it->second;
}

std::span<const std::string_view> builtin_attribute_vocabulary() {
    return kAttributeVocabulary;
}

std::span<const std::string_view> builtin_source_vocabulary() {
    return kSourceVocabulary;
}

}  // namespace tspe
