#pragma once

// Sliding-window decomposition of an H x W grid into K x K windows.
// Windows are fully contained; trailing rows/columns that cannot hold a full
// window are dropped. Windows are ordered row-major by origin.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "flowloss/error.hpp"
#include "flowloss/feature_map.hpp"
#include "flowloss/flow_field.hpp"

namespace flowloss {

inline constexpr std::size_t kDefaultPatchSize = 3;

struct GridSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t patch_size = kDefaultPatchSize;
  std::size_t stride = kDefaultPatchSize;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Window {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

struct PatchGrid {
  GridSpec spec;
  std::vector<Window> windows;

  std::size_t size() const noexcept { return windows.size(); }
  std::size_t locations() const noexcept { return spec.patch_size * spec.patch_size; }
};

/// C x K x K block copied out of a dense grid; location i = r*K + c.
struct Patch {
  std::size_t channels = 0;
  std::size_t size = 0;  // K
  std::vector<double> values;

  std::size_t locations() const noexcept { return size * size; }
  double at(std::size_t c, std::size_t i) const { return values[c * locations() + i]; }
  double& at(std::size_t c, std::size_t i) { return values[c * locations() + i]; }
};

inline std::size_t window_count(const GridSpec& spec) {
  return ((spec.height - spec.patch_size) / spec.stride + 1) *
         ((spec.width - spec.patch_size) / spec.stride + 1);
}

inline PatchGrid build_grid(const GridSpec& spec) {
  if (spec.patch_size < 1 || spec.stride < 1) {
    throw Error(Errc::InvalidArgument, "patch size and stride must be >= 1");
  }
  if (spec.patch_size > spec.height || spec.patch_size > spec.width) {
    throw Error(Errc::PatchLargerThanGrid, "patch size " + std::to_string(spec.patch_size) +
                                               " exceeds grid " + std::to_string(spec.height) + "x" +
                                               std::to_string(spec.width));
  }
  PatchGrid grid{spec, {}};
  grid.windows.reserve(window_count(spec));
  for (std::size_t r = 0; r + spec.patch_size <= spec.height; r += spec.stride) {
    for (std::size_t c = 0; c + spec.patch_size <= spec.width; c += spec.stride) {
      grid.windows.push_back({r, c});
    }
  }
  return grid;
}

/// Generic extraction from a planar C x H x W buffer.
inline Patch extract_patch(std::span<const double> planes, std::size_t channels, std::size_t height,
                           std::size_t width, Window window, std::size_t patch_size) {
  Patch patch{channels, patch_size, std::vector<double>(channels * patch_size * patch_size)};
  std::size_t k = 0;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t r = 0; r < patch_size; ++r) {
      const double* src = planes.data() + (c * height + window.row + r) * width + window.col;
      for (std::size_t q = 0; q < patch_size; ++q) patch.values[k++] = src[q];
    }
  }
  return patch;
}

inline Patch extract_patch(const FeatureMap& f, Window window, std::size_t patch_size) {
  return extract_patch(f.values, f.channels, f.height, f.width, window, patch_size);
}

/// Two-channel patch: channel 0 is u, channel 1 is v.
inline Patch extract_patch(const FlowField& flow, Window window, std::size_t patch_size) {
  Patch patch{2, patch_size, std::vector<double>(2 * patch_size * patch_size)};
  const std::size_t n = patch_size * patch_size;
  for (std::size_t r = 0; r < patch_size; ++r) {
    for (std::size_t q = 0; q < patch_size; ++q) {
      const std::size_t src = flow.index(window.row + r, window.col + q);
      patch.values[r * patch_size + q] = flow.u[src];
      patch.values[n + r * patch_size + q] = flow.v[src];
    }
  }
  return patch;
}

inline Patch extract_patch(const SaliencyMap& s, Window window, std::size_t patch_size) {
  return extract_patch(s.values, 1, s.height, s.width, window, patch_size);
}

/// Frobenius norm over every component of the patch.
inline double patch_flow_norm(const Patch& flow_patch) {
  double sq = 0.0;
  for (double x : flow_patch.values) sq += x * x;
  return std::sqrt(sq);
}

}  // namespace flowloss
