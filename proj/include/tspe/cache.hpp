#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>

#include "tspe/embedding.hpp"

namespace tspe {

// Hash → vector store for one (backend, modality) pair. Entries are held in
// memory and, when a file path is given, appended to a binary record file so
// later processes replay them bit-identically. The file header pins
// backend_id and dimension; opening it under a different backend or
// dimension is a hard error rather than a silent mix of models.
class EmbeddingCache {
public:
    // path empty → memory-only cache.
    EmbeddingCache(std::filesystem::path path, std::string backend_id, std::size_t dimension);

    std::optional<Embedding> get(const std::string& content_hash) const;
    void put(const std::string& content_hash, const Embedding& embedding);

    std::size_t size() const { return entries_.size(); }

private:
    void load_file();
    void append_record(const std::string& content_hash, const Embedding& embedding);

    std::filesystem::path path_;
    std::string backend_id_;
    std::size_t dimension_;
    std::unordered_map<std::string, Embedding> entries_;
};

}  // namespace tspe
