#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "flowloss/tensor_file.hpp"

using namespace flowloss;

TEST(TensorFile, HeaderLayout) {
  const Tensor t{{2, 3}, DType::Float64, {1, 2, 3, 4, 5, 6}};
  const auto bytes = encode_tensor(t);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "FLKT0001");
  EXPECT_EQ(detail::load_u32(bytes, 8), 2u);
  EXPECT_EQ(detail::load_u32(bytes, 12), 2u);
  EXPECT_EQ(detail::load_u32(bytes, 16), 3u);
  EXPECT_EQ(bytes[20], 0);
  EXPECT_EQ(bytes.size(), 21u + 6 * 8);
  EXPECT_EQ(detail::load_f64(bytes, 21 + 8 * 5), 6.0);
}

TEST(TensorFile, BitExactRoundTrip) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint64_t> bits;
  Tensor t{{3, 4, 5}, DType::Float64, std::vector<double>(60)};
  for (auto& x : t.values) {
    do {
      x = std::bit_cast<double>(bits(rng));
    } while (std::isnan(x));
  }
  EXPECT_EQ(decode_tensor(encode_tensor(t)), t);

  Tensor f32{{7}, DType::Float32, {0.5, -1.25, 3.0, 1e-3f, 2.0, 0.0, -7.5}};
  const Tensor back = decode_tensor(encode_tensor(f32));
  EXPECT_EQ(back.dtype, DType::Float32);
  EXPECT_EQ(back.values, f32.values);
  EXPECT_EQ(encode_tensor(back), encode_tensor(f32));
}

TEST(TensorFile, RejectsMalformedInput) {
  auto bytes = encode_tensor({{2}, DType::Float64, {1, 2}});
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_tensor(bad_magic), Error);
  auto short_payload = bytes;
  short_payload.pop_back();
  EXPECT_THROW(decode_tensor(short_payload), Error);
  auto bad_dtype = bytes;
  bad_dtype[16] = 9;
  EXPECT_THROW(decode_tensor(bad_dtype), Error);
}

TEST(TensorFile, MapsConversions) {
  FeatureMap f(2, 3, 4);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = static_cast<double>(i);
  EXPECT_EQ(to_feature_map(decode_tensor(encode_tensor(to_tensor(f)))), f);
  SaliencyMap s(3, 4);
  s.values[5] = 2.0;
  const SaliencyMap back = to_saliency_map(to_tensor(s));
  EXPECT_EQ(back.values, s.values);
  EXPECT_THROW(to_feature_map(to_tensor(s)), Error);
  EXPECT_EQ(to_saliency_map(Tensor{{1, 3, 4}, DType::Float64, s.values}).height, 3u);
}
