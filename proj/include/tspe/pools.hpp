#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tspe/categories.hpp"
#include "tspe/grammar.hpp"

namespace tspe {

struct AttributePool {
    std::string pool_id;
    std::vector<std::string> attributes;
};

struct SourcePool {
    std::string pool_id;
    std::vector<std::string> sources;
};

// A generated global pool pair plus the header recorded in its file.
struct PoolPair {
    AttributePool attributes;
    SourcePool sources;
    Provenance provenance = Provenance::Offline;
    std::uint64_t seed = 0;
};

// Throws ConfigError when entries are empty, duplicated or not single-phrase.
void validate_pool_entries(const std::string& pool_id, const std::vector<std::string>& entries);

void save_pools(const std::filesystem::path& path, const PoolPair& pools);
PoolPair load_pools(const std::filesystem::path& path);

// Per-category subsets of the global pools, as mapped in the category-pools
// configuration file.
struct CategoryPools {
    CategoryId category = CategoryId::MusicalInstruments;
    AttributePool attributes;
    SourcePool sources;
};

class PoolRegistry {
public:
    static PoolRegistry load(const std::filesystem::path& path);

    const CategoryPools& for_category(CategoryId id) const;

private:
    std::map<CategoryId, CategoryPools> by_category_;
};

// Built-in term vocabulary backing the offline generator. Larger than the
// default 30/30 split so retries and other splits have spare terms.
std::span<const std::string_view> builtin_attribute_vocabulary();
std::span<const std::string_view> builtin_source_vocabulary();

}  // namespace tspe
