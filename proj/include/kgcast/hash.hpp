#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace kgcast {

// Incremental FNV-1a (64 bit). Used for content checksums and lineage
// verification across pipeline stages, not for security.
class Fnv64 {
 public:
  Fnv64& update(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv64& update(std::string_view s) { return update(s.data(), s.size()); }
  Fnv64& update_u64(uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    return update(b, 8);
  }
  uint64_t value() const { return state_; }

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline uint64_t fnv64(std::string_view s) { return Fnv64().update(s).value(); }

std::string checksum_hex(uint64_t v);
uint64_t parse_checksum_hex(std::string_view hex);

// Checksum of the raw bytes of a file. Throws ValidationError if unreadable.
uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace kgcast
