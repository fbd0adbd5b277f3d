#include "kgcast/hash.hpp"

#include <cstdio>
#include <fstream>

#include "kgcast/errors.hpp"

namespace kgcast {

std::string checksum_hex(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t parse_checksum_hex(std::string_view s) {
  if (s.size() != 16) throw ValidationError("checksum must be 16 hex digits, got '" + std::string(s) + "'");
  uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= uint64_t(c - '0');
    else if (c >= 'a' && c <= 'f') v |= uint64_t(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= uint64_t(c - 'A' + 10);
    else throw ValidationError("checksum contains non-hex character '" + std::string(1, c) + "'");
  }
  return v;
}

uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file for checksum: " + path.string());
  Fnv64 h;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<size_t>(in.gcount()));
  }
  return h.value();
}

}  // namespace kgcast
