#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "kgcast/errors.hpp"

// Little-endian stream helpers for the binary artifact formats. All
// multi-byte integers on disk are little-endian regardless of host order.

namespace kgcast {

namespace detail {

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
  }
  return v;
}

}  // namespace detail

template <typename T>
void write_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  v = detail::byteswap_if_big(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  static_assert(std::is_trivially_copyable_v<T>);
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IntegrityError("unexpected end of file while reading binary field");
  return detail::byteswap_if_big(v);
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_le<uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, uint64_t max_len = (1ULL << 32)) {
  const uint64_t n = read_le<uint64_t>(is);
  if (n > max_len) throw IntegrityError("string length field exceeds sane bound");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw IntegrityError("unexpected end of file while reading string payload");
  return s;
}

}  // namespace kgcast
