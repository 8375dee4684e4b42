#pragma once

// Motion-guided objectness loss.
//
// Per window p (anchor s_p, stabilized flow):
//   L_p = KL(softmax(z_v / tau) || softmax(z_f / tau))
//   w_p = |v_p| / sum_q |v_q|        (all zero when the sum is below eps)
//   L   = sum_p w_p L_p
//
// Gradients flow into the feature map only; flow, saliency, anchors and
// weights are constants. Windows may be evaluated on several threads, but
// every reduction runs sequentially in window order, so results are
// bit-identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "flowloss/error.hpp"
#include "flowloss/feature_map.hpp"
#include "flowloss/flow_field.hpp"
#include "flowloss/patch_grid.hpp"
#include "flowloss/similarity.hpp"

namespace flowloss {

struct LossReport {
  double total = 0.0;
  std::vector<double> per_patch;
  std::vector<double> weights;
  std::vector<std::size_t> salient;
  GridSpec grid;
  std::vector<Window> windows;

  friend bool operator==(const LossReport&, const LossReport&) = default;
};

struct LossAndGradient {
  LossReport report;
  /// Same C x H x W layout as the input feature map.
  std::vector<double> gradient;
};

/// KL(p_v || p_f). Both inputs must be strictly positive and equally long.
inline double patch_kl(std::span<const double> p_v, std::span<const double> p_f) {
  if (p_v.size() != p_f.size()) {
    throw Error(Errc::LengthMismatch, "distributions have lengths " + std::to_string(p_v.size()) + " and " +
                                          std::to_string(p_f.size()));
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p_v.size(); ++i) kl += p_v[i] * (std::log(p_v[i]) - std::log(p_f[i]));
  return std::max(kl, 0.0);
}

/// Share of total motion carried by each window.
inline std::vector<double> patch_weights(std::span<const double> patch_norms, double eps = kDefaultEps) {
  double total = 0.0;
  for (double n : patch_norms) total += n;
  std::vector<double> w(patch_norms.size(), 0.0);
  if (total < eps) return w;
  for (std::size_t p = 0; p < w.size(); ++p) w[p] = patch_norms[p] / total;
  return w;
}

inline std::vector<double> patch_weights(const std::vector<Patch>& flow_patches, double eps = kDefaultEps) {
  std::vector<double> norms(flow_patches.size());
  for (std::size_t p = 0; p < norms.size(); ++p) norms[p] = patch_flow_norm(flow_patches[p]);
  return patch_weights(norms, eps);
}

namespace loss_detail {

struct WindowResult {
  double loss = 0.0;
  double motion = 0.0;
  std::size_t salient = 0;
  /// dL_p/df_p, C x K*K, before weighting.
  std::vector<double> grad;
};

/// Log-softmax of z / tau.
inline std::vector<double> log_softmax(const std::vector<double>& z, double tau) {
  double peak = z[0] / tau;
  for (double x : z) peak = std::max(peak, x / tau);
  double total = 0.0;
  for (double x : z) total += std::exp(x / tau - peak);
  const double log_total = std::log(total);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] / tau - peak - log_total;
  return out;
}

inline WindowResult evaluate_window(const FeatureMap& f, const FlowField& flow, const SaliencyMap* saliency,
                                    const LossParams& params, Window window, bool with_grad) {
  const std::size_t k = params.patch_size;
  const std::size_t n = k * k;
  const std::size_t channels = f.channels;

  WindowResult r;
  const Patch flow_patch = extract_patch(flow, window, k);
  r.motion = patch_flow_norm(flow_patch);
  if (saliency != nullptr) {
    const Patch s_patch = extract_patch(*saliency, window, k);
    r.salient = select_salient(s_patch.values);
  } else {
    r.salient = fallback_salient(flow_patch);
  }

  const Patch feat = extract_patch(f, window, k);
  const SimilarityVector z_v = flow_similarity(flow_patch, r.salient, params.sigma, params.eps);
  const SimilarityVector z_f = feature_similarity(feat, r.salient, params.eps);
  const std::vector<double> log_pv = log_softmax(z_v, params.tau);
  const std::vector<double> log_pf = log_softmax(z_f, params.tau);

  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) kl += std::exp(log_pv[i]) * (log_pv[i] - log_pf[i]);
  r.loss = std::max(kl, 0.0);
  if (!with_grad) return r;

  // dL_p/dz_f[i] = (p_f[i] - p_v[i]) / tau
  std::vector<double> dz(n);
  for (std::size_t i = 0; i < n; ++i) dz[i] = (std::exp(log_pf[i]) - std::exp(log_pv[i])) / params.tau;

  // Unit-normalized features and their inverse norms.
  std::vector<double> unit(channels * n);
  std::vector<double> inv_norm(n);
  std::vector<bool> clamped(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < channels; ++c) sq += feat.at(c, i) * feat.at(c, i);
    const double norm = std::sqrt(sq);
    clamped[i] = norm < params.eps;
    inv_norm[i] = 1.0 / std::max(norm, params.eps);
    for (std::size_t c = 0; c < channels; ++c) unit[c * n + i] = feat.at(c, i) * inv_norm[i];
  }

  // z_f[i] = unit_s . unit_i, so each location receives dz[i] * unit_s and
  // the anchor additionally receives sum_i dz[i] * unit_i.
  const std::size_t s = r.salient;
  std::vector<double> d_unit(channels * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) d_unit[c * n + i] = dz[i] * unit[c * n + s];
  }
  for (std::size_t c = 0; c < channels; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += dz[i] * unit[c * n + i];
    d_unit[c * n + s] += acc;
  }

  // Back through u = f / |f|: df = (du - u (u . du)) / |f|.
  r.grad.assign(channels * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double proj = 0.0;
    if (!clamped[i]) {
      for (std::size_t c = 0; c < channels; ++c) proj += unit[c * n + i] * d_unit[c * n + i];
    }
    for (std::size_t c = 0; c < channels; ++c) {
      r.grad[c * n + i] = (d_unit[c * n + i] - unit[c * n + i] * proj) * inv_norm[i];
    }
  }
  return r;
}

inline void check_inputs(const FeatureMap& f, const FlowField& flow, const SaliencyMap* saliency,
                         const LossParams& params) {
  validate(params);
  validate(f);
  validate(flow);
  if (f.height != flow.height || f.width != flow.width) {
    throw Error(Errc::DimMismatch, "features are " + std::to_string(f.height) + "x" + std::to_string(f.width) +
                                       " but flow is " + std::to_string(flow.height) + "x" +
                                       std::to_string(flow.width));
  }
  if (saliency != nullptr) {
    validate(*saliency);
    if (saliency->height != f.height || saliency->width != f.width) {
      throw Error(Errc::DimMismatch, "saliency is " + std::to_string(saliency->height) + "x" +
                                         std::to_string(saliency->width) + " but features are " +
                                         std::to_string(f.height) + "x" + std::to_string(f.width));
    }
  }
}

inline LossAndGradient run(const FeatureMap& f, const FlowField& flow, const SaliencyMap* saliency,
                           const LossParams& params, bool with_grad, unsigned threads) {
  check_inputs(f, flow, saliency, params);
  const PatchGrid grid = build_grid({f.height, f.width, params.patch_size, params.stride});
  const std::size_t count = grid.size();

  std::vector<WindowResult> results(count);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      results[p] = evaluate_window(f, flow, saliency, params, grid.windows[p], with_grad);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, count);
  if (workers == 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t b = 0; b < count; b += chunk) pool.emplace_back(work, b, std::min(count, b + chunk));
  }

  LossAndGradient out;
  LossReport& report = out.report;
  report.grid = grid.spec;
  report.windows = grid.windows;
  report.per_patch.resize(count);
  report.salient.resize(count);
  std::vector<double> motion(count);
  for (std::size_t p = 0; p < count; ++p) {
    report.per_patch[p] = results[p].loss;
    report.salient[p] = results[p].salient;
    motion[p] = results[p].motion;
  }
  report.weights = patch_weights(motion, params.eps);
  for (std::size_t p = 0; p < count; ++p) report.total += report.weights[p] * report.per_patch[p];

  if (with_grad) {
    out.gradient.assign(f.values.size(), 0.0);
    const std::size_t k = params.patch_size;
    const std::size_t n = k * k;
    for (std::size_t p = 0; p < count; ++p) {
      const double w = report.weights[p];
      if (w == 0.0) continue;
      const Window win = grid.windows[p];
      for (std::size_t c = 0; c < f.channels; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
          out.gradient[f.index(c, win.row + i / k, win.col + i % k)] += w * results[p].grad[c * n + i];
        }
      }
    }
  }
  return out;
}

}  // namespace loss_detail

/// `flow` must already be stabilized. Without a saliency map each window's
/// anchor is its largest-motion pixel.
inline LossReport flow_loss(const FeatureMap& f, const FlowField& flow, const LossParams& params = {},
                            unsigned threads = 1) {
  return loss_detail::run(f, flow, nullptr, params, false, threads).report;
}

inline LossReport flow_loss(const FeatureMap& f, const FlowField& flow, const SaliencyMap& saliency,
                            const LossParams& params = {}, unsigned threads = 1) {
  return loss_detail::run(f, flow, &saliency, params, false, threads).report;
}

inline LossAndGradient flow_loss_grad(const FeatureMap& f, const FlowField& flow, const LossParams& params = {},
                                      unsigned threads = 1) {
  return loss_detail::run(f, flow, nullptr, params, true, threads);
}

inline LossAndGradient flow_loss_grad(const FeatureMap& f, const FlowField& flow, const SaliencyMap& saliency,
                                      const LossParams& params = {}, unsigned threads = 1) {
  return loss_detail::run(f, flow, &saliency, params, true, threads);
}

// ---------------------------------------------------------------------------
// Finite-difference verification

struct GradCheckOptions {
  double step = 1e-5;
  /// Coordinates to probe; 0 or anything >= the tensor size probes them all.
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Test hook: perturb the analytic gradient so the detector must fire.
  bool corrupt_analytic = false;
};

struct CoordinateError {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative = 0.0;
};

struct GradCheckReport {
  double max_relative = 0.0;
  double mean_relative = 0.0;
  std::vector<CoordinateError> coordinates;
};

/// Compares the analytic gradient against central differences
/// (L(f + h e) - L(f - h e)) / 2h. Relative error uses the denominator
/// max(|analytic|, |numeric|, 1e-8).
inline GradCheckReport finite_diff_check(const FeatureMap& f, const FlowField& flow, const SaliencyMap* saliency,
                                         const LossParams& params, const GradCheckOptions& options = {}) {
  if (!(options.step > 0.0)) throw Error(Errc::InvalidArgument, "finite-difference step must be > 0");
  LossAndGradient base = loss_detail::run(f, flow, saliency, params, true, options.threads);
  if (options.corrupt_analytic) {
    for (double& g : base.gradient) g = 1.1 * g + 1e-3;
  }

  const std::size_t total = f.values.size();
  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.samples != 0 && options.samples < total) {
    std::mt19937_64 rng(options.seed);
    // Partial Fisher-Yates, then restore ascending order for stable output.
    for (std::size_t i = 0; i < options.samples; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, total - 1);
      std::swap(coords[i], coords[pick(rng)]);
    }
    coords.resize(options.samples);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckReport report;
  report.coordinates.reserve(coords.size());
  FeatureMap probe = f;
  double sum = 0.0;
  for (std::size_t idx : coords) {
    const double original = probe.values[idx];
    probe.values[idx] = original + options.step;
    const LossReport plus = loss_detail::run(probe, flow, saliency, params, false, options.threads).report;
    probe.values[idx] = original - options.step;
    const LossReport minus = loss_detail::run(probe, flow, saliency, params, false, options.threads).report;
    probe.values[idx] = original;

    // L(f+he) - L(f-he) = sum_p w_p (L_p(+) - L_p(-)); weights do not depend
    // on f and windows that miss the coordinate cancel exactly. Differencing
    // per window keeps the rounding of the O(1) total out of the quotient.
    double delta = 0.0;
    for (std::size_t p = 0; p < plus.per_patch.size(); ++p) {
      delta += plus.weights[p] * (plus.per_patch[p] - minus.per_patch[p]);
    }

    CoordinateError e;
    e.index = idx;
    e.analytic = base.gradient[idx];
    e.numeric = delta / (2.0 * options.step);
    e.relative = std::abs(e.analytic - e.numeric) / std::max({std::abs(e.analytic), std::abs(e.numeric), 1e-8});
    report.max_relative = std::max(report.max_relative, e.relative);
    sum += e.relative;
    report.coordinates.push_back(e);
  }
  if (!coords.empty()) report.mean_relative = sum / static_cast<double>(coords.size());
  return report;
}

inline GradCheckReport finite_diff_check(const FeatureMap& f, const FlowField& flow, const LossParams& params,
                                         const GradCheckOptions& options = {}) {
  return finite_diff_check(f, flow, nullptr, params, options);
}

inline GradCheckReport finite_diff_check(const FeatureMap& f, const FlowField& flow, const SaliencyMap& saliency,
                                         const LossParams& params, const GradCheckOptions& options = {}) {
  return finite_diff_check(f, flow, &saliency, params, options);
}

}  // namespace flowloss
