#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "flowloss/similarity.hpp"

using namespace flowloss;

TEST(SelectSalient, ArgmaxWithLowestIndexTies) {
  EXPECT_EQ(select_salient(std::vector<double>{0.1, 0.9, 0.2, 0.3}), 1u);
  EXPECT_EQ(select_salient(std::vector<double>{0.5, 0.5, 0.5, 0.5}), 0u);
  EXPECT_EQ(select_salient(std::vector<double>{0.2, 0.7, 0.7}), 1u);
}

TEST(SelectSalient, MonotoneInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> s(9);
    for (auto& x : s) x = u(rng);
    const std::size_t base = select_salient(s);
    std::vector<double> shifted = s, scaled = s;
    for (auto& x : shifted) x += 5.0;
    for (auto& x : scaled) x *= 3.0;
    EXPECT_EQ(select_salient(shifted), base);
    EXPECT_EQ(select_salient(scaled), base);
  }
}

TEST(FallbackSalient, PicksLargestMotion) {
  Patch p{2, 2, std::vector<double>(8, 0.0)};
  EXPECT_EQ(fallback_salient(p), 0u);
  p.at(0, 2) = 0.3;
  p.at(1, 2) = -0.2;
  EXPECT_EQ(fallback_salient(p), 2u);
  for (double& x : p.values) x *= 7.5;
  EXPECT_EQ(fallback_salient(p), 2u);
}

TEST(FeatureSimilarity, CosineCases) {
  // Location 0 is the anchor; 1 orthogonal, 2 antiparallel, 3 parallel but longer, 4 zero.
  Patch f{2, 0, {}};
  f.size = 3;  // K = 3, only the first five locations are meaningful
  f.values.assign(2 * 9, 0.0);
  auto set = [&](std::size_t i, double a, double b) { f.at(0, i) = a; f.at(1, i) = b; };
  set(0, 1.0, 1.0);
  set(1, -2.0, 2.0);
  set(2, -1.0, -1.0);
  set(3, 4.0, 4.0);
  set(4, 0.0, 0.0);
  for (std::size_t i = 5; i < 9; ++i) set(i, 1.0, 0.0);
  const SimilarityVector z = feature_similarity(f, 0);
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_NEAR(z[1], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(z[2], -1.0);
  EXPECT_DOUBLE_EQ(z[3], 1.0);
  EXPECT_EQ(z[4], 0.0);
  EXPECT_NEAR(z[5], std::sqrt(0.5), 1e-15);
}

TEST(FeatureSimilarity, ScaleInvariantAndBounded) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> gain(0.01, 50);
  Patch f{5, 3, std::vector<double>(45)};
  for (auto& x : f.values) x = n(rng);
  const SimilarityVector z = feature_similarity(f, 4);
  Patch g = f;
  for (std::size_t i = 0; i < 9; ++i) {
    const double a = gain(rng);
    for (std::size_t c = 0; c < 5; ++c) g.at(c, i) *= a;
  }
  const SimilarityVector zg = feature_similarity(g, 4);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_LE(std::abs(z[i]), 1.0 + 1e-15);
    EXPECT_NEAR(z[i], zg[i], 1e-14);
  }
}

TEST(RbfSimilarity, PointValues) {
  EXPECT_EQ(rbf_similarity({1.0, 0.0}, {0.0, 0.0}, 0.7), 0.0);
  EXPECT_EQ(rbf_similarity({0.0, 0.0}, {0.0, 0.0}, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(rbf_similarity({0.6, 0.8}, {0.6, 0.8}, 0.7), 1.0);
  EXPECT_NEAR(rbf_similarity({1.0, 0.0}, {0.0, 1.0}, 0.7), 0.2396510364417758, 1e-15);
  // Opposing directions saturate at the same floor as orthogonal ones.
  EXPECT_DOUBLE_EQ(rbf_similarity({1.0, 0.0}, {-2.0, 0.0}, 0.7), 2.0 * std::exp(-1.0 / 0.7));
  // A stationary anchor has no direction: cosine is taken as 0.
  EXPECT_DOUBLE_EQ(rbf_similarity({0.0, 0.0}, {0.0, 0.5}, 0.7), 0.5 * std::exp(-1.0 / 0.7));
}

TEST(RbfSimilarity, BoundsAndMonotonicity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 1000; ++t) {
    const Flow2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
    const double s = rbf_similarity(x, y, 0.7);
    const double ny = std::hypot(y[0], y[1]);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, ny * (1 + 1e-15));
  }
  // Rotating y toward x never decreases the similarity.
  double last = -1.0;
  for (int deg = 180; deg >= 0; deg -= 5) {
    const double a = deg * 3.14159265358979323846 / 180.0;
    const double s = rbf_similarity({1.0, 0.0}, {std::cos(a), std::sin(a)}, 0.7);
    EXPECT_GE(s, last - 1e-15);
    last = s;
  }
}

TEST(FlowSimilarity, MatchesEntrywiseKernel) {
  Patch v{2, 2, {0.0, 0.5, -0.3, 0.9, 0.0, 0.1, 0.4, -0.2}};
  const SimilarityVector z = flow_similarity(v, 3, 0.7);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(z[i], rbf_similarity({v.at(0, 3), v.at(1, 3)}, {v.at(0, i), v.at(1, i)}, 0.7));
  }
  EXPECT_EQ(z[0], 0.0);

  Patch zero{2, 3, std::vector<double>(18, 0.0)};
  for (double x : flow_similarity(zero, 0)) EXPECT_EQ(x, 0.0);

  Patch same{2, 2, {0.6, 0.6, 0.6, 0.6, 0.8, 0.8, 0.8, 0.8}};
  for (double x : flow_similarity(same, 1)) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(SoftmaxTemp, Values) {
  const Distribution u = softmax_temp(std::vector<double>{0.3, 0.3, 0.3, 0.3, 0.3}, 0.1);
  for (double p : u) EXPECT_DOUBLE_EQ(p, 0.2);

  const Distribution two = softmax_temp(std::vector<double>{1.0, 0.0}, 0.1);
  EXPECT_NEAR(two[0], 0.9999546021312976, 1e-15);
  EXPECT_NEAR(two[1], 4.5397868702434395e-05, 1e-18);
}

TEST(SoftmaxTemp, InvariantsFuzz) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> shift(-100, 100);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> z(9);
    for (auto& x : z) x = u(rng);
    const Distribution p = softmax_temp(z, 0.1);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double x : p) EXPECT_GT(x, 0.0);
    const double c = shift(rng);
    std::vector<double> zc = z;
    for (auto& x : zc) x += c;
    const Distribution pc = softmax_temp(zc, 0.1);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(p[i], pc[i], 1e-12);
  }
}

TEST(SoftmaxTemp, StableForLargeLogits) {
  // |z / tau| = 700 on either side of zero.
  for (double big : {70.0, -70.0}) {
    const Distribution p = softmax_temp(std::vector<double>{big, 0.0, 0.0}, 0.1);
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
    for (double x : p) {
      EXPECT_TRUE(std::isfinite(x));
      EXPECT_GT(x, 0.0);
    }
  }
}

TEST(SoftmaxTemp, ColdLimitConcentratesMass) {
  const Distribution p = softmax_temp(std::vector<double>{0.2, 0.9, 0.89, -0.5}, 1e-3);
  EXPECT_GT(p[1], 0.999);
}

TEST(LossParams, Defaults) {
  const LossParams p;
  EXPECT_EQ(p.patch_size, 3u);
  EXPECT_EQ(p.stride, 3u);
  EXPECT_EQ(p.tau, 0.1);
  EXPECT_EQ(p.sigma, 0.7);
  EXPECT_THROW(validate(LossParams{3, 3, 0.0, 0.7, 1e-12}), Error);
  EXPECT_THROW(validate(LossParams{3, 3, 0.1, -1.0, 1e-12}), Error);
}
