#pragma once

// 16-bit fixed-point flow storage and x/y word packing.
//
// A component x is stored as round_half_away(clamp(x, -32768/s, 32767/s) * s)
// for a global per-file scale s, so the reconstruction error is bounded by
// 0.5/s. Packing puts u in the high half-word and v in the low half-word.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "flowloss/error.hpp"
#include "flowloss/flow_field.hpp"

namespace flowloss {

inline constexpr std::uint32_t kDefaultScale = 64;

struct QuantizedFlow {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t scale = kDefaultScale;
  std::vector<std::int16_t> qu;
  std::vector<std::int16_t> qv;

  std::size_t size() const noexcept { return width * height; }
  friend bool operator==(const QuantizedFlow&, const QuantizedFlow&) = default;
};

struct PackedImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> words;

  std::size_t size() const noexcept { return width * height; }
  friend bool operator==(const PackedImage&, const PackedImage&) = default;
};

inline std::int16_t quantize_component(double x, std::uint32_t scale) noexcept {
  const double s = static_cast<double>(scale);
  const double clamped = std::clamp(x, -32768.0 / s, 32767.0 / s);
  // std::round is half-away-from-zero.
  const double q = std::clamp(std::round(clamped * s), -32768.0, 32767.0);
  return static_cast<std::int16_t>(q);
}

inline QuantizedFlow quantize(const FlowField& flow, std::uint32_t scale = kDefaultScale) {
  if (scale < 1) throw Error(Errc::InvalidArgument, "quantization scale must be >= 1");
  validate(flow);
  QuantizedFlow q{flow.width, flow.height, scale, {}, {}};
  q.qu.resize(flow.size());
  q.qv.resize(flow.size());
  for (std::size_t i = 0; i < flow.size(); ++i) {
    q.qu[i] = quantize_component(flow.u[i], scale);
    q.qv[i] = quantize_component(flow.v[i], scale);
  }
  return q;
}

inline FlowField dequantize(const QuantizedFlow& q) {
  if (q.scale < 1) throw Error(Errc::InvalidArgument, "quantization scale must be >= 1");
  if (q.qu.size() != q.size() || q.qv.size() != q.size()) {
    throw Error(Errc::DimMismatch, "quantized planes do not match width*height");
  }
  FlowField flow(q.width, q.height);
  const double s = static_cast<double>(q.scale);
  for (std::size_t i = 0; i < q.size(); ++i) {
    flow.u[i] = q.qu[i] / s;
    flow.v[i] = q.qv[i] / s;
  }
  return flow;
}

constexpr std::uint32_t pack_word(std::int16_t qu, std::int16_t qv) noexcept {
  return (static_cast<std::uint32_t>(std::bit_cast<std::uint16_t>(qu)) << 16) |
         std::bit_cast<std::uint16_t>(qv);
}

constexpr std::int16_t unpack_u(std::uint32_t word) noexcept {
  return std::bit_cast<std::int16_t>(static_cast<std::uint16_t>(word >> 16));
}

constexpr std::int16_t unpack_v(std::uint32_t word) noexcept {
  return std::bit_cast<std::int16_t>(static_cast<std::uint16_t>(word & 0xFFFFu));
}

inline PackedImage pack(const QuantizedFlow& q) {
  if (q.qu.size() != q.size() || q.qv.size() != q.size()) {
    throw Error(Errc::DimMismatch, "quantized planes do not match width*height");
  }
  PackedImage p{q.width, q.height, std::vector<std::uint32_t>(q.size())};
  for (std::size_t i = 0; i < q.size(); ++i) p.words[i] = pack_word(q.qu[i], q.qv[i]);
  return p;
}

inline QuantizedFlow unpack(const PackedImage& p, std::uint32_t scale) {
  if (scale < 1) throw Error(Errc::InvalidArgument, "quantization scale must be >= 1");
  if (p.words.size() != p.size()) {
    throw Error(Errc::DimMismatch, "packed plane does not match width*height");
  }
  QuantizedFlow q{p.width, p.height, scale, std::vector<std::int16_t>(p.size()),
                  std::vector<std::int16_t>(p.size())};
  for (std::size_t i = 0; i < p.size(); ++i) {
    q.qu[i] = unpack_u(p.words[i]);
    q.qv[i] = unpack_v(p.words[i]);
  }
  return q;
}

}  // namespace flowloss
