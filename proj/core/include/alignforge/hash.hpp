#pragma once

#include <string>
#include <string_view>

namespace alignforge {

// SHA-256 hex digest (lowercase). Used for document checksums, dataset
// checksums, prompt digests, and mock fixture matching.
std::string sha256_hex(std::string_view data);

// Digest of a file's raw bytes. Throws std::runtime_error if unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace alignforge
