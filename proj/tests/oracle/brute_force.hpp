#pragma once

// Straight-line reference implementation of the whole loss, from raw flow to
// the weighted total. Shares no code with the library: it works on flat
// arrays with explicit index arithmetic and plain softmax/KL formulas, and it
// is templated on the scalar so it can also run in extended precision.

#include <cmath>
#include <cstddef>
#include <vector>

namespace flowloss::oracle {

struct Problem {
  std::size_t channels = 0, height = 0, width = 0;
  std::vector<double> features;  // C*H*W
  std::vector<double> flow_u;    // H*W raw (unstabilized)
  std::vector<double> flow_v;
  const std::vector<double>* saliency = nullptr;  // H*W or none
  std::size_t k = 3, stride = 3;
  double tau = 0.1, sigma = 0.7, eps = 1e-12;
};

template <class Real>
struct Result {
  Real total = 0;
  std::vector<Real> per_patch;
  std::vector<Real> weights;
  std::vector<std::size_t> salient;
};

template <class Real>
Result<Real> brute_force_loss(const Problem& pb) {
  using std::exp;
  using std::log;
  using std::sqrt;
  const std::size_t H = pb.height, W = pb.width, C = pb.channels, K = pb.k;
  const std::size_t HW = H * W;
  const Real tau = pb.tau, sigma = pb.sigma, eps = pb.eps;

  // Background motion removal.
  Real mu = 0, mv = 0;
  for (std::size_t i = 0; i < HW; ++i) {
    mu += pb.flow_u[i];
    mv += pb.flow_v[i];
  }
  mu /= Real(HW);
  mv /= Real(HW);
  Real peak = 0;
  for (std::size_t i = 0; i < HW; ++i) {
    peak = std::max(peak, std::abs(Real(pb.flow_u[i]) - mu));
    peak = std::max(peak, std::abs(Real(pb.flow_v[i]) - mv));
  }
  std::vector<Real> u(HW, Real(0)), v(HW, Real(0));
  if (peak >= eps) {
    for (std::size_t i = 0; i < HW; ++i) {
      u[i] = (Real(pb.flow_u[i]) - mu) / peak;
      v[i] = (Real(pb.flow_v[i]) - mv) / peak;
    }
  }

  Result<Real> out;
  std::vector<Real> motion;
  for (std::size_t r0 = 0; r0 + K <= H; r0 += pb.stride) {
    for (std::size_t c0 = 0; c0 + K <= W; c0 += pb.stride) {
      auto pix = [&](std::size_t i) { return (r0 + i / K) * W + (c0 + i % K); };

      Real m2 = 0;
      for (std::size_t i = 0; i < K * K; ++i) m2 += u[pix(i)] * u[pix(i)] + v[pix(i)] * v[pix(i)];
      motion.push_back(sqrt(m2));

      std::size_t s = 0;
      if (pb.saliency) {
        for (std::size_t i = 1; i < K * K; ++i) {
          if ((*pb.saliency)[pix(i)] > (*pb.saliency)[pix(s)]) s = i;
        }
      } else {
        Real best = -1;
        for (std::size_t i = 0; i < K * K; ++i) {
          const Real n2 = u[pix(i)] * u[pix(i)] + v[pix(i)] * v[pix(i)];
          if (n2 > best) {
            best = n2;
            s = i;
          }
        }
      }
      out.salient.push_back(s);

      std::vector<Real> zf(K * K), zv(K * K);
      auto fnorm = [&](std::size_t i) {
        Real acc = 0;
        for (std::size_t c = 0; c < C; ++c) {
          const Real x = pb.features[c * HW + pix(i)];
          acc += x * x;
        }
        return std::max(Real(sqrt(acc)), eps);
      };
      const Real ns = fnorm(s);
      const Real us = u[pix(s)], vs = v[pix(s)];
      const Real nvs = sqrt(us * us + vs * vs);
      for (std::size_t i = 0; i < K * K; ++i) {
        Real dot = 0;
        for (std::size_t c = 0; c < C; ++c) {
          dot += Real(pb.features[c * HW + pix(s)]) / ns * (Real(pb.features[c * HW + pix(i)]) / fnorm(i));
        }
        zf[i] = dot;

        const Real ui = u[pix(i)], vi = v[pix(i)];
        const Real nvi = sqrt(ui * ui + vi * vi);
        Real cosine = 0;
        if (nvs >= eps && nvi >= eps) cosine = (us * ui + vs * vi) / (nvs * nvi);
        if (cosine < 0) cosine = 0;
        if (cosine > 1) cosine = 1;
        zv[i] = nvi * exp((cosine - 1) / sigma);
      }

      auto softmax = [&](const std::vector<Real>& z) {
        Real top = z[0];
        for (Real x : z) top = std::max(top, x);
        std::vector<Real> p(z.size());
        Real denom = 0;
        for (std::size_t i = 0; i < z.size(); ++i) denom += p[i] = exp((z[i] - top) / tau);
        for (Real& x : p) x /= denom;
        return p;
      };
      const std::vector<Real> pv = softmax(zv), pf = softmax(zf);
      Real kl = 0;
      for (std::size_t i = 0; i < K * K; ++i) kl += pv[i] * log(pv[i] / pf[i]);
      out.per_patch.push_back(kl);
    }
  }

  Real motion_sum = 0;
  for (Real m : motion) motion_sum += m;
  for (std::size_t p = 0; p < motion.size(); ++p) {
    out.weights.push_back(motion_sum >= eps ? motion[p] / motion_sum : Real(0));
    out.total += out.weights[p] * out.per_patch[p];
  }
  return out;
}

}  // namespace flowloss::oracle
