#pragma once

// Little-endian primitive encoding shared by the SKDS, SKVE and SKPM formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "scorekeeping/errors.hpp"

namespace scorekeeping::binary {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(u & 0xFF);
    u = static_cast<U>(u >> 8);
  }
  out.write(bytes, sizeof(T));
}

inline void write_f32(std::ostream& out, float value) { write_le(out, std::bit_cast<std::uint32_t>(value)); }
inline void write_f64(std::ostream& out, double value) { write_le(out, std::bit_cast<std::uint64_t>(value)); }

/// Reads exactly n bytes or throws FormatError naming `what`.
inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError(std::string("truncated file while reading ") + what);
}

template <typename T>
T read_le(std::istream& in, const char* what) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  unsigned char bytes[sizeof(T)];
  read_exact(in, reinterpret_cast<char*>(bytes), sizeof(T), what);
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | bytes[i]);
  return static_cast<T>(u);
}

inline float read_f32(std::istream& in, const char* what) { return std::bit_cast<float>(read_le<std::uint32_t>(in, what)); }
inline double read_f64(std::istream& in, const char* what) { return std::bit_cast<double>(read_le<std::uint64_t>(in, what)); }

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4];
  read_exact(in, got, 4, "magic");
  if (std::memcmp(got, magic, 4) != 0) throw FormatError(std::string("bad magic, expected ") + magic);
}

inline bool at_eof(std::istream& in) { return in.peek() == std::char_traits<char>::eof(); }

}  // namespace scorekeeping::binary
