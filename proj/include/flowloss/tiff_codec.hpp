#pragma once

// Packed-flow TIFF container.
//
// Writes a single-image little-endian baseline TIFF: one 32-bit sample per
// pixel, Deflate compression (tag value 8), strips of at most 64 rows, and the
// quantization scale in private tag 65000 (LONG). SampleFormat is declared as
// IEEE float, but strip payloads are handled as opaque 32-bit words and never
// pass through a float, so NaN bit patterns survive untouched.
//
// The decoder accepts exactly the layouts the encoder produces and rejects
// everything else with UnsupportedTiff.

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flowloss/detail/bytes.hpp"
#include "flowloss/error.hpp"
#include "flowloss/quantize.hpp"

namespace flowloss {

inline constexpr std::uint16_t kScaleTag = 65000;
inline constexpr std::uint32_t kMaxStripRows = 64;

struct DecodedTiff {
  PackedImage image;
  std::uint32_t scale = 0;
};

namespace tiff_detail {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kFillOrder = 266,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kTileLength = 323,
  kTileOffsets = 324,
  kTileByteCounts = 325,
  kSampleFormat = 339,
};

enum Type : std::uint16_t { kShort = 3, kLong = 4 };

inline constexpr std::uint16_t kDeflate = 8;
inline constexpr std::uint16_t kIeeeFloat = 3;

struct Entry {
  std::uint16_t tag;
  std::uint16_t type;
  std::vector<std::uint32_t> values;
};

inline std::vector<std::uint8_t> deflate_strip(const std::uint8_t* data, std::size_t size) {
  uLongf bound = compressBound(static_cast<uLong>(size));
  std::vector<std::uint8_t> out(bound);
  const int rc = compress2(out.data(), &bound, data, static_cast<uLong>(size), Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw Error(Errc::InvalidArgument, "zlib compress2 failed with code " + std::to_string(rc));
  out.resize(bound);
  return out;
}

inline std::uint32_t type_size(std::uint16_t type) {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: case 13: return 4;
    case 5: case 10: case 12: case 16: case 17: case 18: return 8;
    default: return 0;
  }
}

[[noreturn]] inline void unsupported(const std::string& why) { throw Error(Errc::UnsupportedTiff, why); }

}  // namespace tiff_detail

inline std::vector<std::uint8_t> encode_tiff(const PackedImage& image, std::uint32_t scale) {
  using namespace detail;
  using namespace tiff_detail;
  if (image.width == 0 || image.height == 0) {
    throw Error(Errc::NonPositiveDims, "packed image has zero width or height");
  }
  if (image.words.size() != image.size()) {
    throw Error(Errc::DimMismatch, "packed plane does not match width*height");
  }
  if (scale < 1) throw Error(Errc::InvalidArgument, "quantization scale must be >= 1");

  // Raw little-endian words, row-major.
  Bytes raw;
  raw.reserve(4 * image.size());
  for (std::uint32_t w : image.words) store_u32(raw, w);

  const std::size_t row_bytes = 4 * image.width;
  const std::size_t n_strips = (image.height + kMaxStripRows - 1) / kMaxStripRows;
  std::vector<Bytes> strips;
  strips.reserve(n_strips);
  for (std::size_t s = 0; s < n_strips; ++s) {
    const std::size_t row0 = s * kMaxStripRows;
    const std::size_t rows = std::min<std::size_t>(kMaxStripRows, image.height - row0);
    strips.push_back(deflate_strip(raw.data() + row0 * row_bytes, rows * row_bytes));
  }

  std::vector<std::uint32_t> counts(n_strips);
  for (std::size_t s = 0; s < n_strips; ++s) counts[s] = static_cast<std::uint32_t>(strips[s].size());

  std::vector<Entry> entries = {
      {kImageWidth, kLong, {static_cast<std::uint32_t>(image.width)}},
      {kImageLength, kLong, {static_cast<std::uint32_t>(image.height)}},
      {kBitsPerSample, kShort, {32}},
      {kCompression, kShort, {kDeflate}},
      {kPhotometric, kShort, {1}},
      {kStripOffsets, kLong, std::vector<std::uint32_t>(n_strips, 0)},
      {kSamplesPerPixel, kShort, {1}},
      {kRowsPerStrip, kLong, {kMaxStripRows}},
      {kStripByteCounts, kLong, counts},
      {kPlanarConfig, kShort, {1}},
      {kSampleFormat, kShort, {kIeeeFloat}},
      {kScaleTag, kLong, {scale}},
  };

  // Layout: header | IFD | out-of-line arrays | strips.
  const std::size_t ifd_offset = 8;
  const std::size_t ifd_size = 2 + 12 * entries.size() + 4;
  std::size_t cursor = ifd_offset + ifd_size;
  std::vector<std::size_t> array_offset(entries.size(), 0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::size_t bytes = entries[e].values.size() * type_size(entries[e].type);
    if (bytes > 4) {
      array_offset[e] = cursor;
      cursor += bytes;
    }
  }
  std::vector<std::uint32_t> offsets(n_strips);
  for (std::size_t s = 0; s < n_strips; ++s) {
    cursor += cursor & 1u;  // word alignment
    offsets[s] = static_cast<std::uint32_t>(cursor);
    cursor += strips[s].size();
  }
  entries[5].values = offsets;

  Bytes out;
  out.reserve(cursor);
  out.push_back('I');
  out.push_back('I');
  store_u16(out, 42);
  store_u32(out, static_cast<std::uint32_t>(ifd_offset));

  store_u16(out, static_cast<std::uint16_t>(entries.size()));
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Entry& entry = entries[e];
    store_u16(out, entry.tag);
    store_u16(out, entry.type);
    store_u32(out, static_cast<std::uint32_t>(entry.values.size()));
    if (array_offset[e] != 0) {
      store_u32(out, static_cast<std::uint32_t>(array_offset[e]));
    } else if (entry.type == kShort) {
      store_u16(out, static_cast<std::uint16_t>(entry.values[0]));
      store_u16(out, entry.values.size() > 1 ? static_cast<std::uint16_t>(entry.values[1]) : 0);
    } else {
      store_u32(out, entry.values[0]);
    }
  }
  store_u32(out, 0);  // no further IFDs

  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (array_offset[e] == 0) continue;
    for (std::uint32_t value : entries[e].values) {
      if (entries[e].type == kShort) {
        store_u16(out, static_cast<std::uint16_t>(value));
      } else {
        store_u32(out, value);
      }
    }
  }
  for (std::size_t s = 0; s < n_strips; ++s) {
    while (out.size() < offsets[s]) out.push_back(0);
    out.insert(out.end(), strips[s].begin(), strips[s].end());
  }
  return out;
}

inline DecodedTiff decode_tiff(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  using namespace tiff_detail;
  if (bytes.size() < 8) unsupported("file shorter than a TIFF header");
  if (bytes[0] != 'I' || bytes[1] != 'I') unsupported("only little-endian (II) TIFF is supported");
  if (load_u16(bytes, 2) != 42) unsupported("bad TIFF version number (BigTIFF is not supported)");

  const std::uint32_t ifd = load_u32(bytes, 4);
  if (ifd < 8 || static_cast<std::uint64_t>(ifd) + 2 > bytes.size()) unsupported("IFD offset out of range");
  const std::uint16_t n_entries = load_u16(bytes, ifd);
  const std::uint64_t ifd_end = static_cast<std::uint64_t>(ifd) + 2 + 12ull * n_entries + 4;
  if (ifd_end > bytes.size()) unsupported("IFD runs past end of file");
  if (load_u32(bytes, static_cast<std::size_t>(ifd_end - 4)) != 0) unsupported("multi-image TIFF");

  std::map<std::uint16_t, std::vector<std::uint32_t>> tags;
  for (std::uint16_t e = 0; e < n_entries; ++e) {
    const std::size_t at = ifd + 2 + 12u * e;
    const std::uint16_t tag = load_u16(bytes, at);
    const std::uint16_t type = load_u16(bytes, at + 2);
    const std::uint32_t count = load_u32(bytes, at + 4);
    if (type != kShort && type != kLong) {
      // Only integer tags are meaningful to this layout; anything else we
      // care about is a layout we did not write.
      tags[tag] = {};
      continue;
    }
    const std::uint64_t total = static_cast<std::uint64_t>(count) * type_size(type);
    std::size_t data_at = at + 8;
    if (total > 4) {
      const std::uint32_t off = load_u32(bytes, at + 8);
      if (static_cast<std::uint64_t>(off) + total > bytes.size()) {
        unsupported("tag " + std::to_string(tag) + " values run past end of file");
      }
      data_at = off;
    }
    std::vector<std::uint32_t> values(count);
    for (std::uint32_t k = 0; k < count; ++k) {
      values[k] = type == kShort ? load_u16(bytes, data_at + 2 * k) : load_u32(bytes, data_at + 4 * k);
    }
    tags[tag] = std::move(values);
  }

  auto single = [&](std::uint16_t tag, const char* name) -> std::uint32_t {
    auto it = tags.find(tag);
    if (it == tags.end()) unsupported(std::string("missing required tag ") + name);
    if (it->second.size() != 1) unsupported(std::string("tag ") + name + " must hold one integer value");
    return it->second[0];
  };
  auto optional_equals = [&](std::uint16_t tag, std::uint32_t expected, const char* name) {
    auto it = tags.find(tag);
    if (it == tags.end()) return;
    if (it->second.size() != 1 || it->second[0] != expected) {
      unsupported(std::string("unsupported ") + name + " value");
    }
  };

  for (std::uint16_t tile_tag : {kTileWidth, kTileLength, kTileOffsets, kTileByteCounts}) {
    if (tags.count(tile_tag)) unsupported("tiled TIFF is not supported");
  }
  const std::uint32_t width = single(kImageWidth, "ImageWidth");
  const std::uint32_t height = single(kImageLength, "ImageLength");
  if (width == 0 || height == 0) unsupported("zero image dimension");
  if (single(kBitsPerSample, "BitsPerSample") != 32) unsupported("BitsPerSample must be 32");
  if (single(kCompression, "Compression") != kDeflate) unsupported("compression must be Deflate (8)");
  if (single(kSampleFormat, "SampleFormat") != kIeeeFloat) unsupported("SampleFormat must be IEEE float (3)");
  optional_equals(kSamplesPerPixel, 1, "SamplesPerPixel");
  optional_equals(kPlanarConfig, 1, "PlanarConfiguration");
  optional_equals(kPredictor, 1, "Predictor");
  optional_equals(kFillOrder, 1, "FillOrder");

  if (!tags.count(kScaleTag)) throw Error(Errc::MissingScaleTag, "private tag 65000 (quantization scale) absent");
  const auto& scale_values = tags[kScaleTag];
  if (scale_values.size() != 1 || scale_values[0] < 1) unsupported("scale tag must be one LONG >= 1");

  std::uint32_t rows_per_strip = height;
  if (tags.count(kRowsPerStrip)) rows_per_strip = std::min(single(kRowsPerStrip, "RowsPerStrip"), height);
  if (rows_per_strip == 0) unsupported("RowsPerStrip is zero");
  const std::size_t n_strips = (height + rows_per_strip - 1) / rows_per_strip;
  if (!tags.count(kStripOffsets) || !tags.count(kStripByteCounts)) unsupported("missing strip tables");
  const auto& offsets = tags[kStripOffsets];
  const auto& counts = tags[kStripByteCounts];
  if (offsets.size() != n_strips || counts.size() != n_strips) unsupported("strip table length mismatch");

  DecodedTiff result;
  result.scale = scale_values[0];
  result.image.width = width;
  result.image.height = height;
  result.image.words.resize(static_cast<std::size_t>(width) * height);

  const std::size_t row_bytes = 4ull * width;
  std::vector<std::uint8_t> raw;
  for (std::size_t s = 0; s < n_strips; ++s) {
    if (static_cast<std::uint64_t>(offsets[s]) + counts[s] > bytes.size()) {
      throw Error(Errc::CorruptStrip, "strip " + std::to_string(s) + " runs past end of file");
    }
    const std::size_t row0 = s * rows_per_strip;
    const std::size_t rows = std::min<std::size_t>(rows_per_strip, height - row0);
    const std::size_t expected = rows * row_bytes;
    raw.assign(expected, 0);
    uLongf got = static_cast<uLongf>(expected);
    const int rc = uncompress(raw.data(), &got, bytes.data() + offsets[s], counts[s]);
    if (rc != Z_OK || got != expected) {
      throw Error(Errc::CorruptStrip, "strip " + std::to_string(s) + " at byte offset " +
                                          std::to_string(offsets[s]) + " failed to inflate (zlib code " +
                                          std::to_string(rc) + ")");
    }
    for (std::size_t k = 0; k < rows * width; ++k) {
      result.image.words[row0 * width + k] = load_u32(raw, 4 * k);
    }
  }
  return result;
}

}  // namespace flowloss
