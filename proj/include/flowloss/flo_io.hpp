#pragma once

// Middlebury .flo reader/writer.
//
// Layout (little-endian): float32 magic 202021.25 ("PIEH"), int32 width,
// int32 height, then width*height interleaved (u, v) float32 pairs, row-major.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "flowloss/detail/bytes.hpp"
#include "flowloss/error.hpp"
#include "flowloss/flow_field.hpp"

namespace flowloss {

inline constexpr float kFloMagic = 202021.25f;
inline constexpr std::size_t kFloHeaderBytes = 12;

inline FlowField read_flo(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  if (bytes.size() < 4) {
    throw Error(Errc::TruncatedPayload,
                "input holds " + std::to_string(bytes.size()) + " bytes, magic needs 4 at offset 0");
  }
  if (load_f32(bytes, 0) != kFloMagic) {
    throw Error(Errc::BadMagic, "byte offset 0: magic word is not 202021.25");
  }
  if (bytes.size() < kFloHeaderBytes) {
    throw Error(Errc::TruncatedPayload, "header ends at byte offset " +
                                            std::to_string(bytes.size()) + ", expected 12");
  }
  const std::int32_t w = load_i32(bytes, 4);
  const std::int32_t h = load_i32(bytes, 8);
  if (w <= 0 || h <= 0) {
    throw Error(Errc::NonPositiveDims, "byte offset 4: dimensions " + std::to_string(w) + "x" +
                                           std::to_string(h) + " are not positive");
  }
  const std::uint64_t expected =
      kFloHeaderBytes + 8ull * static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(h);
  if (bytes.size() != expected) {
    throw Error(Errc::TruncatedPayload, "payload size mismatch at byte offset " +
                                            std::to_string(std::min<std::uint64_t>(bytes.size(), expected)) +
                                            ": expected " + std::to_string(expected) + " bytes, got " +
                                            std::to_string(bytes.size()));
  }

  FlowField flow(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  std::size_t off = kFloHeaderBytes;
  for (std::size_t i = 0; i < flow.size(); ++i, off += 8) {
    const float u = load_f32(bytes, off);
    const float v = load_f32(bytes, off + 4);
    if (!std::isfinite(u) || !std::isfinite(v)) {
      throw Error(Errc::NonFiniteSample, "byte offset " + std::to_string(std::isfinite(u) ? off + 4 : off) +
                                             ": non-finite sample");
    }
    flow.u[i] = u;
    flow.v[i] = v;
  }
  return flow;
}

/// Samples are narrowed to float32 with round-to-nearest-even.
inline std::vector<std::uint8_t> write_flo(const FlowField& flow) {
  using namespace detail;
  validate(flow);
  Bytes out;
  out.reserve(kFloHeaderBytes + 8 * flow.size());
  store_f32(out, kFloMagic);
  store_i32(out, static_cast<std::int32_t>(flow.width));
  store_i32(out, static_cast<std::int32_t>(flow.height));
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const float u = static_cast<float>(flow.u[i]);
    const float v = static_cast<float>(flow.v[i]);
    if (!std::isfinite(u) || !std::isfinite(v)) {
      throw Error(Errc::NonFiniteSample,
                  "pixel " + std::to_string(i) + " overflows float32 when narrowed");
    }
    store_f32(out, u);
    store_f32(out, v);
  }
  return out;
}

}  // namespace flowloss
