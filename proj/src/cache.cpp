#include "tspe/cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "tspe/errors.hpp"

namespace tspe {
namespace {

// Record file layout (host-endian doubles; the cache is a local artifact,
// not an interchange format):
//   magic "TSPEEMB1" | u32 id_len | id bytes | u64 dimension
//   repeated: u32 hash_len | hash bytes | u8 normalized | dimension * f64
constexpr char kMagic[8] = {'T', 'S', 'P', 'E', 'E', 'M', 'B', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

bool read_exact(std::istream& in, char* buf, std::streamsize n) {
    in.read(buf, n);
    return in.gcount() == n;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path path, std::string backend_id,
                               std::size_t dimension)
    : path_(std::move(path)), backend_id_(std::move(backend_id)), dimension_(dimension) {
    if (dimension_ == 0) throw CacheError("embedding cache needs a positive dimension");
    if (!path_.empty() && std::filesystem::exists(path_)) load_file();
}

void EmbeddingCache::load_file() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw CacheError("cannot open cache file: " + path_.string());
    char magic[8];
    if (!read_exact(in, magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw CacheError("not a cache file: " + path_.string());
    std::uint32_t id_len = 0;
    if (!read_exact(in, reinterpret_cast<char*>(&id_len), sizeof id_len) || id_len > 4096)
        throw CacheError("corrupt cache header: " + path_.string());
    std::string id(id_len, '\0');
    std::uint64_t dim = 0;
    if (!read_exact(in, id.data(), id_len) ||
        !read_exact(in, reinterpret_cast<char*>(&dim), sizeof dim))
        throw CacheError("corrupt cache header: " + path_.string());
    if (id != backend_id_)
        throw CacheError("cache file " + path_.string() + " belongs to backend '" + id +
                         "', not '" + backend_id_ + "'");
    if (dim != dimension_)
        throw CacheError("cache file " + path_.string() + " stores dimension " +
                         std::to_string(dim) + ", expected " + std::to_string(dimension_));

    // A partial trailing record (torn write from a crashed run) is treated
    // as never written; anything else malformed is an error.
    for (;;) {
        std::uint32_t hash_len = 0;
        if (!read_exact(in, reinterpret_cast<char*>(&hash_len), sizeof hash_len)) break;
        if (hash_len == 0 || hash_len > 4096)
            throw CacheError("corrupt cache record in " + path_.string());
        std::string hash(hash_len, '\0');
        if (!read_exact(in, hash.data(), hash_len)) break;
        char normalized = 0;
        if (!read_exact(in, &normalized, 1)) break;
        Embedding e;
        e.values.resize(dimension_);
        if (!read_exact(in, reinterpret_cast<char*>(e.values.data()),
                        static_cast<std::streamsize>(dimension_ * sizeof(double))))
            break;
        e.normalized = normalized != 0;
        entries_[hash] = std::move(e);
    }
}

std::optional<Embedding> EmbeddingCache::get(const std::string& content_hash) const {
    auto it = entries_.find(content_hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::put(const std::string& content_hash, const Embedding& embedding) {
    if (embedding.dimension() != dimension_)
        throw CacheError("cache put with dimension " + std::to_string(embedding.dimension()) +
                         ", expected " + std::to_string(dimension_));
    auto [it, inserted] = entries_.emplace(content_hash, embedding);
    if (!inserted) return;  // first write wins; hits must stay bit-identical
    if (!path_.empty()) append_record(content_hash, embedding);
}

void EmbeddingCache::append_record(const std::string& content_hash, const Embedding& embedding) {
    const bool fresh = !std::filesystem::exists(path_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw CacheError("cannot write cache file: " + path_.string());
    if (fresh) {
        out.write(kMagic, 8);
        write_u32(out, static_cast<std::uint32_t>(backend_id_.size()));
        out.write(backend_id_.data(), static_cast<std::streamsize>(backend_id_.size()));
        write_u64(out, dimension_);
    }
    write_u32(out, static_cast<std::uint32_t>(content_hash.size()));
    out.write(content_hash.data(), static_cast<std::streamsize>(content_hash.size()));
    const char normalized = embedding.normalized ? 1 : 0;
    out.write(&normalized, 1);
    out.write(reinterpret_cast<const char*>(embedding.values.data()),
              static_cast<std::streamsize>(embedding.values.size() * sizeof(double)));
    if (!out) throw CacheError("short write to cache file: " + path_.string());
}

}  // namespace tspe
