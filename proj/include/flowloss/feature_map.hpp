#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "flowloss/error.hpp"

namespace flowloss {

/// C x H x W dense feature tensor, channel-major.
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(std::size_t c, std::size_t h, std::size_t w)
      : channels(c), height(h), width(w), values(c * h * w, 0.0) {}

  std::size_t plane() const noexcept { return height * width; }
  std::size_t index(std::size_t c, std::size_t row, std::size_t col) const noexcept {
    return (c * height + row) * width + col;
  }
  double& at(std::size_t c, std::size_t row, std::size_t col) { return values[index(c, row, col)]; }
  double at(std::size_t c, std::size_t row, std::size_t col) const { return values[index(c, row, col)]; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

/// Per-pixel attention mass used to pick each patch's anchor location.
struct SaliencyMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  SaliencyMap() = default;
  SaliencyMap(std::size_t h, std::size_t w) : height(h), width(w), values(h * w, 0.0) {}

  double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
};

inline void validate(const FeatureMap& f) {
  if (f.channels == 0 || f.height == 0 || f.width == 0) {
    throw Error(Errc::NonPositiveDims, "feature map has a zero dimension");
  }
  if (f.values.size() != f.channels * f.plane()) {
    throw Error(Errc::DimMismatch, "feature map holds " + std::to_string(f.values.size()) +
                                       " values, expected " + std::to_string(f.channels * f.plane()));
  }
  for (double x : f.values) {
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteSample, "feature map holds a non-finite value");
  }
}

inline void validate(const SaliencyMap& s) {
  if (s.height == 0 || s.width == 0) throw Error(Errc::NonPositiveDims, "saliency map has a zero dimension");
  if (s.values.size() != s.height * s.width) throw Error(Errc::DimMismatch, "saliency plane size mismatch");
  for (double x : s.values) {
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteSample, "saliency map holds a non-finite value");
  }
}

}  // namespace flowloss
