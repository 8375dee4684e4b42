#pragma once

// Intra-patch similarity vectors and their temperature softmax.
//
// For a patch with anchor location s:
//   feature:  z_f[i] = n_s . n_i,           n = f / max(|f|, eps)
//   flow:     z_v[i] = S(v_s, v_i),         S(x, y) = |y| exp((satcos(x, y) - 1) / sigma)
// where satcos clamps the cosine to [0, 1] and is 0 when either vector is
// shorter than eps.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "flowloss/error.hpp"
#include "flowloss/patch_grid.hpp"
#include "flowloss/preprocess.hpp"

namespace flowloss {

inline constexpr double kDefaultTau = 0.1;
inline constexpr double kDefaultSigma = 0.7;

using Flow2 = std::array<double, 2>;
/// K*K entries, row-major over patch locations.
using SimilarityVector = std::vector<double>;
/// K*K strictly positive entries summing to one.
using Distribution = std::vector<double>;

struct LossParams {
  std::size_t patch_size = kDefaultPatchSize;
  std::size_t stride = kDefaultPatchSize;
  double tau = kDefaultTau;
  double sigma = kDefaultSigma;
  double eps = kDefaultEps;
};

inline void validate(const LossParams& params) {
  if (params.patch_size < 1) throw Error(Errc::InvalidArgument, "patch size must be >= 1");
  if (params.stride < 1) throw Error(Errc::InvalidArgument, "stride must be >= 1");
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) throw Error(Errc::InvalidArgument, "tau must be > 0");
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
    throw Error(Errc::InvalidArgument, "sigma must be > 0");
  }
  if (!(params.eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be > 0");
}

/// Argmax over the patch's saliency values; ties go to the lowest index.
inline std::size_t select_salient(std::span<const double> saliency_patch) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < saliency_patch.size(); ++i) {
    if (saliency_patch[i] > saliency_patch[best]) best = i;
  }
  return best;
}

/// Location of the largest flow magnitude, used when no saliency map is given.
inline std::size_t fallback_salient(const Patch& flow_patch) {
  const std::size_t n = flow_patch.locations();
  std::size_t best = 0;
  double best_sq = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = flow_patch.at(0, i);
    const double v = flow_patch.at(1, i);
    const double sq = u * u + v * v;
    if (sq > best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

inline SimilarityVector feature_similarity(const Patch& feature_patch, std::size_t salient,
                                           double eps = kDefaultEps) {
  const std::size_t n = feature_patch.locations();
  const std::size_t channels = feature_patch.channels;
  std::vector<double> inv_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < channels; ++c) sq += feature_patch.at(c, i) * feature_patch.at(c, i);
    inv_norm[i] = 1.0 / std::max(std::sqrt(sq), eps);
  }
  SimilarityVector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < channels; ++c) dot += feature_patch.at(c, salient) * feature_patch.at(c, i);
    z[i] = dot * inv_norm[salient] * inv_norm[i];
  }
  return z;
}

inline double saturated_cosine(const Flow2& x, const Flow2& y, double eps = kDefaultEps) {
  const double nx = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  const double ny = std::sqrt(y[0] * y[0] + y[1] * y[1]);
  if (nx < eps || ny < eps) return 0.0;
  return std::clamp((x[0] * y[0] + x[1] * y[1]) / (nx * ny), 0.0, 1.0);
}

inline double rbf_similarity(const Flow2& x, const Flow2& y, double sigma = kDefaultSigma,
                             double eps = kDefaultEps) {
  const double ny = std::sqrt(y[0] * y[0] + y[1] * y[1]);
  return ny * std::exp((saturated_cosine(x, y, eps) - 1.0) / sigma);
}

inline SimilarityVector flow_similarity(const Patch& flow_patch, std::size_t salient,
                                        double sigma = kDefaultSigma, double eps = kDefaultEps) {
  const std::size_t n = flow_patch.locations();
  const Flow2 anchor{flow_patch.at(0, salient), flow_patch.at(1, salient)};
  SimilarityVector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = rbf_similarity(anchor, {flow_patch.at(0, i), flow_patch.at(1, i)}, sigma, eps);
  }
  return z;
}

/// softmax(z / tau) with the max subtracted before exponentiation.
inline Distribution softmax_temp(std::span<const double> z, double tau = kDefaultTau) {
  if (!(tau > 0.0)) throw Error(Errc::InvalidArgument, "tau must be > 0");
  if (z.empty()) return {};
  double peak = z[0] / tau;
  for (double x : z) peak = std::max(peak, x / tau);
  Distribution p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] / tau - peak);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

}  // namespace flowloss
