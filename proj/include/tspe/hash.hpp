#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tspe {

// Lowercase hex SHA-256 digest of a byte string. Used for content addressing
// (embedding cache keys, prompt-set provenance).
std::string sha256_hex(std::string_view bytes);

// Digest of a file's raw bytes. Throws ConfigError if the file is unreadable.
std::string sha256_hex_file(const std::filesystem::path& path);

}  // namespace tspe
