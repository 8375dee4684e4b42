#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "flowloss/error.hpp"

namespace flowloss {

/// Dense per-pixel motion field. `u` holds horizontal and `v` vertical
/// displacement in pixels, both row-major with width*height samples.
struct FlowField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> u;
  std::vector<double> v;

  FlowField() = default;
  FlowField(std::size_t w, std::size_t h) : width(w), height(h), u(w * h, 0.0), v(w * h, 0.0) {}

  std::size_t size() const noexcept { return width * height; }
  std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * width + col; }

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Throws if the field breaks its shape or finiteness invariants.
inline void validate(const FlowField& flow) {
  if (flow.width == 0 || flow.height == 0) {
    throw Error(Errc::NonPositiveDims, "flow field has zero width or height");
  }
  if (flow.u.size() != flow.size() || flow.v.size() != flow.size()) {
    throw Error(Errc::DimMismatch, "flow planes hold " + std::to_string(flow.u.size()) + "/" +
                                       std::to_string(flow.v.size()) + " samples, expected " +
                                       std::to_string(flow.size()));
  }
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i])) {
      throw Error(Errc::NonFiniteSample, "non-finite flow sample at pixel " + std::to_string(i));
    }
  }
}

}  // namespace flowloss
