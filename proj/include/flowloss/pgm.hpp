#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "flowloss/preprocess.hpp"

namespace flowloss {

/// Binary P5 greyscale, maxval 255. Pixels are round(255 * x / max(x));
/// everything is black when the maximum is below eps.
inline std::vector<std::uint8_t> encode_pgm(const ScalarMap& map, double eps = kDefaultEps) {
  const std::string header =
      "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  double peak = 0.0;
  for (double x : map.values) peak = std::max(peak, x);
  out.reserve(out.size() + map.values.size());
  for (double x : map.values) {
    const double level = peak < eps ? 0.0 : std::round(255.0 * x / peak);
    out.push_back(static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0)));
  }
  return out;
}

}  // namespace flowloss
