#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowloss/flow_field.hpp"

namespace flowloss {

inline constexpr double kDefaultEps = 1e-12;

/// Per-pixel non-negative map (flow magnitude for visualization).
struct ScalarMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
};

/// Background motion removal: subtract the per-channel spatial mean, then
/// divide by the largest absolute component over both channels so every
/// output component lands in [-1, 1]. Sums run in row-major order.
/// A field whose centered maximum is below `eps` maps to the zero field.
inline FlowField stabilize(const FlowField& flow, double eps = kDefaultEps) {
  validate(flow);
  const std::size_t n = flow.size();
  double sum_u = 0.0;
  double sum_v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_u += flow.u[i];
    sum_v += flow.v[i];
  }
  const double mean_u = sum_u / static_cast<double>(n);
  const double mean_v = sum_v / static_cast<double>(n);

  FlowField out(flow.width, flow.height);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] = flow.u[i] - mean_u;
    out.v[i] = flow.v[i] - mean_v;
    peak = std::max({peak, std::abs(out.u[i]), std::abs(out.v[i])});
  }
  if (peak < eps) {
    std::fill(out.u.begin(), out.u.end(), 0.0);
    std::fill(out.v.begin(), out.v.end(), 0.0);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] /= peak;
    out.v[i] /= peak;
  }
  return out;
}

inline ScalarMap flow_norm_map(const FlowField& flow) {
  validate(flow);
  ScalarMap map{flow.width, flow.height, std::vector<double>(flow.size())};
  for (std::size_t i = 0; i < flow.size(); ++i) {
    map.values[i] = std::sqrt(flow.u[i] * flow.u[i] + flow.v[i] * flow.v[i]);
  }
  return map;
}

}  // namespace flowloss
