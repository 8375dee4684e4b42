#pragma once

// Dense tensor container used for feature and saliency maps.
//
//   bytes 0..7   magic "FLKT0001"
//   u32          rank
//   u32 x rank   dims
//   u8           dtype (0 = float64, 1 = float32)
//   payload      row-major little-endian values

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "flowloss/detail/bytes.hpp"
#include "flowloss/error.hpp"
#include "flowloss/feature_map.hpp"

namespace flowloss {

inline constexpr char kTensorMagic[8] = {'F', 'L', 'K', 'T', '0', '0', '0', '1'};

enum class DType : std::uint8_t { Float64 = 0, Float32 = 1 };

struct Tensor {
  std::vector<std::uint32_t> dims;
  DType dtype = DType::Float64;
  /// Always held at 64-bit; float32 payloads are widened on decode.
  std::vector<double> values;

  std::size_t count() const noexcept {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  using namespace detail;
  if (t.values.size() != t.count()) throw Error(Errc::BadTensorFile, "value count does not match dims");
  Bytes out(kTensorMagic, kTensorMagic + 8);
  store_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) store_u32(out, d);
  out.push_back(static_cast<std::uint8_t>(t.dtype));
  for (double x : t.values) {
    if (t.dtype == DType::Float64) {
      store_f64(out, x);
    } else {
      store_f32(out, static_cast<float>(x));
    }
  }
  return out;
}

inline Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  if (bytes.size() < 13 || std::memcmp(bytes.data(), kTensorMagic, 8) != 0) {
    throw Error(Errc::BadTensorFile, "byte offset 0: missing FLKT0001 magic");
  }
  const std::uint32_t rank = load_u32(bytes, 8);
  const std::uint64_t header = 12ull + 4ull * rank + 1;
  if (bytes.size() < header) throw Error(Errc::BadTensorFile, "header truncated at byte offset " + std::to_string(bytes.size()));
  Tensor t;
  t.dims.resize(rank);
  std::uint64_t count = 1;
  for (std::uint32_t r = 0; r < rank; ++r) {
    t.dims[r] = load_u32(bytes, 12 + 4 * r);
    count *= t.dims[r];
  }
  const std::uint8_t code = bytes[12 + 4 * rank];
  if (code > 1) {
    throw Error(Errc::BadTensorFile, "byte offset " + std::to_string(12 + 4 * rank) + ": unknown dtype code " +
                                         std::to_string(code));
  }
  t.dtype = static_cast<DType>(code);
  const std::uint64_t width = t.dtype == DType::Float64 ? 8 : 4;
  if (bytes.size() != header + count * width) {
    throw Error(Errc::BadTensorFile, "payload holds " + std::to_string(bytes.size() - header) +
                                         " bytes, expected " + std::to_string(count * width));
  }
  t.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t off = header + i * width;
    t.values[i] = t.dtype == DType::Float64 ? load_f64(bytes, off) : static_cast<double>(load_f32(bytes, off));
  }
  return t;
}

inline Tensor to_tensor(const FeatureMap& f, DType dtype = DType::Float64) {
  return {{static_cast<std::uint32_t>(f.channels), static_cast<std::uint32_t>(f.height),
           static_cast<std::uint32_t>(f.width)},
          dtype,
          f.values};
}

inline Tensor to_tensor(const SaliencyMap& s, DType dtype = DType::Float64) {
  return {{static_cast<std::uint32_t>(s.height), static_cast<std::uint32_t>(s.width)}, dtype, s.values};
}

/// Accepts rank 3 (C, H, W).
inline FeatureMap to_feature_map(const Tensor& t) {
  if (t.dims.size() != 3) throw Error(Errc::BadTensorFile, "feature tensor must have rank 3 (C, H, W)");
  FeatureMap f(t.dims[0], t.dims[1], t.dims[2]);
  f.values = t.values;
  validate(f);
  return f;
}

/// Accepts rank 2 (H, W) or rank 3 with a single channel.
inline SaliencyMap to_saliency_map(const Tensor& t) {
  if (t.dims.size() == 2 || (t.dims.size() == 3 && t.dims[0] == 1)) {
    SaliencyMap s(t.dims[t.dims.size() - 2], t.dims.back());
    s.values = t.values;
    validate(s);
    return s;
  }
  throw Error(Errc::BadTensorFile, "saliency tensor must have shape (H, W) or (1, H, W)");
}

}  // namespace flowloss
