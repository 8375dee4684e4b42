#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

// Little-endian load/store helpers shared by the file codecs.
namespace flowloss::detail {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

inline std::uint16_t load_u16(ByteSpan b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

inline std::uint32_t load_u32(ByteSpan b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

inline std::uint64_t load_u64(ByteSpan b, std::size_t off) {
  return static_cast<std::uint64_t>(load_u32(b, off)) |
         (static_cast<std::uint64_t>(load_u32(b, off + 4)) << 32);
}

inline std::int32_t load_i32(ByteSpan b, std::size_t off) {
  return std::bit_cast<std::int32_t>(load_u32(b, off));
}

inline float load_f32(ByteSpan b, std::size_t off) { return std::bit_cast<float>(load_u32(b, off)); }

inline double load_f64(ByteSpan b, std::size_t off) {
  return std::bit_cast<double>(load_u64(b, off));
}

inline void store_u16(Bytes& out, std::uint16_t x) {
  out.push_back(static_cast<std::uint8_t>(x));
  out.push_back(static_cast<std::uint8_t>(x >> 8));
}

inline void store_u32(Bytes& out, std::uint32_t x) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(x >> s));
}

inline void store_u64(Bytes& out, std::uint64_t x) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(x >> s));
}

inline void store_i32(Bytes& out, std::int32_t x) { store_u32(out, std::bit_cast<std::uint32_t>(x)); }
inline void store_f32(Bytes& out, float x) { store_u32(out, std::bit_cast<std::uint32_t>(x)); }
inline void store_f64(Bytes& out, double x) { store_u64(out, std::bit_cast<std::uint64_t>(x)); }

inline void patch_u32(Bytes& out, std::size_t off, std::uint32_t x) {
  for (int k = 0; k < 4; ++k) out[off + k] = static_cast<std::uint8_t>(x >> (8 * k));
}

}  // namespace flowloss::detail
