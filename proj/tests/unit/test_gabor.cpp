#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "packscope/error.hpp"
#include "packscope/gabor.hpp"
#include "test_support.hpp"

namespace packscope {
namespace {

constexpr double kPi = std::numbers::pi;

Kernel random_kernel(std::size_t size, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  Kernel k;
  k.size = size;
  k.coeffs.resize(size * size);
  for (auto& c : k.coeffs) c = rng.uniform(-1.0, 1.0);
  return k;
}

TEST(GaborKernel, CenterIsOne) {
  for (double theta : {0.0, 0.3, kPi / 2}) {
    for (double lambda : {10.0, 5.0, 10.0 / 3}) {
      GaborParams p;
      p.wavelength = lambda;
      p.orientation = theta;
      const auto k = make_gabor_kernel(p);
      EXPECT_DOUBLE_EQ(k.at(k.half(), k.half()), 1.0);
    }
  }
}

TEST(GaborKernel, QuarterTurnIsTranspose) {
  for (double lambda : {10.0, 5.0, 10.0 / 3}) {
    GaborParams p;
    p.wavelength = lambda;
    const auto k0 = make_gabor_kernel(p);
    p.orientation = kPi / 2;
    const auto k90 = make_gabor_kernel(p);
    const auto t = k0.transposed();
    for (std::size_t i = 0; i < k90.coeffs.size(); ++i) EXPECT_NEAR(k90.coeffs[i], t.coeffs[i], 1e-12);
  }
}

// Golden value from tests/oracles/gen_golden.py: exp(-4/18) * cos(0.4 pi).
TEST(GaborKernel, OffsetTwoRight) {
  const auto k = make_gabor_kernel(GaborParams{});
  EXPECT_NEAR(k.at(4, 6), 0.24744146553295332, 1e-15);
  EXPECT_NEAR(k.at(4, 2), 0.24744146553295332, 1e-15);
}

TEST(GaborKernel, RowsIncreaseDownward) {
  // At theta = pi/2, x' = y: the off-centre maximum of the cosine lies along rows.
  GaborParams p;
  p.orientation = kPi / 2;
  const auto k = make_gabor_kernel(p);
  EXPECT_NEAR(k.at(6, 4), 0.24744146553295332, 1e-12);
}

TEST(GaborKernel, InvalidParams) {
  const auto expect_invalid = [](GaborParams p) {
    try {
      (void)make_gabor_kernel(p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    }
  };
  GaborParams p;
  p.kernel_size = 8;
  expect_invalid(p);
  p = {};
  p.wavelength = 0;
  expect_invalid(p);
  p = {};
  p.sigma = -1;
  expect_invalid(p);
  p = {};
  p.gamma = 0;
  expect_invalid(p);
}

TEST(Convolve, IdentityKernel) {
  Kernel id;
  id.size = 3;
  id.coeffs = {0, 0, 0, 0, 1, 0, 0, 0, 0};
  const auto img = test::random_image(7, 5, 1);
  const auto out = convolve2d(img, id);
  ASSERT_EQ(out.width, 7u);
  ASSERT_EQ(out.height, 5u);
  for (std::size_t i = 0; i < out.values.size(); ++i) EXPECT_EQ(out.values[i], img.pixels()[i]);
}

TEST(Convolve, ConstantImage) {
  const ByteImage img(11, 6, std::vector<std::uint8_t>(66, 77), 66);
  const auto k = random_kernel(9, 4);
  const auto out = convolve2d(img, k);
  for (double v : out.values) EXPECT_NEAR(v, 77 * k.sum(), 1e-10);
}

TEST(Convolve, FlipsTheKernel) {
  // Kernel with a single 1 right of centre shifts the image right by one.
  Kernel k;
  k.size = 3;
  k.coeffs = {0, 0, 0, 0, 0, 1, 0, 0, 0};
  const ByteImage img(3, 1, {1, 2, 3}, 3);
  const auto out = convolve2d(img, k);
  EXPECT_EQ(out.values, (std::vector<double>{1, 1, 2}));
}

TEST(Convolve, MatchesDirectOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto img = test::random_image(16, 16, seed);
    const auto k = random_kernel(9, seed + 100);
    const auto out = convolve2d(img, k);
    const auto ref = test::direct_convolution(img, k);
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(out.values[i], static_cast<double>(ref[i]), 1e-9);
  }
}

TEST(Convolve, Linearity) {
  const auto i1 = test::random_image(20, 13, 8);
  const auto i2 = test::random_image(20, 13, 9);
  const auto k = random_kernel(5, 10);
  const double a = 0.75;
  const double b = -2.5;
  ResponseMap mix = ResponseMap::from_image(i1);
  const auto m2 = ResponseMap::from_image(i2);
  for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values[i] = a * mix.values[i] + b * m2.values[i];
  const auto lhs = convolve2d(mix, k);
  const auto r1 = convolve2d(i1, k);
  const auto r2 = convolve2d(i2, k);
  for (std::size_t i = 0; i < lhs.values.size(); ++i) {
    const double rhs = a * r1.values[i] + b * r2.values[i];
    ASSERT_NEAR(lhs.values[i], rhs, 1e-6 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(GaborJet, DefaultLengthAndNames) {
  const GaborBank bank;
  EXPECT_EQ(bank.feature_count(), 24u);
  EXPECT_EQ(extract_gabor_jet(test::random_image(64, 64, 1), bank).size(), 24u);
  const auto names = bank.feature_names();
  ASSERT_EQ(names.size(), 24u);
  EXPECT_EQ(names[0], "g_f0_o0_mean");
  EXPECT_EQ(names[1], "g_f0_o0_var");
  EXPECT_EQ(names[23], "g_f2_o3_var");
}

TEST(GaborJet, ConstantImage) {
  const GaborBank bank;
  const ByteImage img(64, 64, std::vector<std::uint8_t>(64 * 64, 128), 64 * 64);
  const auto jet = extract_gabor_jet(img, bank);
  const auto kernels = bank.kernels();
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(jet[2 * i + 1], 0.0) << i;
    EXPECT_NEAR(jet[2 * i], 128 * kernels[i].sum(), 1e-9) << i;
  }
}

// Golden values from tests/oracles/gen_golden.py (numpy direct convolution).
TEST(GaborJet, GoldenVector) {
  const std::vector<double> golden{
      2076.2760867269258,  115406.98387684394, 2815.5744776760284, 120226.48400673797, 2083.9062451237842,
      128347.80284163405,  2813.4875835182047, 135436.16288056428, -460.93101667647375, 110849.91926817116,
      261.10892659178796,  106499.53291742338, -457.66621667465972, 130727.73743598406, 260.27550691187434,
      121175.76312489613,  371.9996771574115,  101119.51112732357, 98.734994093416475, 111981.0182673948,
      371.62228151829959,  125159.05699234319, 98.788658432813833, 97780.542683382257,
  };
  const auto jet = extract_gabor_jet(test::random_image(64, 64, 20240601), GaborBank{});
  for (std::size_t i = 0; i < golden.size(); ++i) EXPECT_NEAR(jet[i], golden[i], 1e-9) << i;
}

TEST(GaborJet, MatchesOracleOnSeededImages) {
  const GaborBank bank;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto img = test::random_image(64, 64, seed * 7919);
    const auto jet = extract_gabor_jet(img, bank);
    const auto ref = test::oracle_jet(img, bank);
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(jet[i], ref[i], 1e-9) << "seed " << seed << " i " << i;
  }
}

TEST(GaborJet, TransposeSymmetry) {
  GaborBank bank;
  bank.orientations = {0.0, kPi / 2};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto img = test::random_image(64, 64, seed);
    const auto a = extract_gabor_jet(img, bank);
    const auto b = extract_gabor_jet(img.transposed(), bank);
    for (std::size_t fi = 0; fi < bank.frequencies.size(); ++fi) {
      for (std::size_t s = 0; s < 2; ++s) {
        EXPECT_NEAR(a[fi * 4 + s], b[fi * 4 + 2 + s], 1e-9);
        EXPECT_NEAR(a[fi * 4 + 2 + s], b[fi * 4 + s], 1e-9);
      }
    }
  }
}

TEST(GaborJet, DimensionalityAndVarianceProperty) {
  Xorshift64Star rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    GaborBank bank;
    bank.frequencies.clear();
    bank.orientations.clear();
    bank.image_size = 24;
    const auto nf = 1 + rng.below(5);
    const auto no = 1 + rng.below(5);
    for (std::size_t i = 0; i < nf; ++i) bank.frequencies.push_back(rng.uniform(0.05, 0.45));
    for (std::size_t i = 0; i < no; ++i) bank.orientations.push_back(rng.uniform(0.0, kPi));
    const auto jet = extract_gabor_jet(test::random_image(1 + rng.below(100), 1 + rng.below(100), rng.next()), bank);
    ASSERT_EQ(jet.size(), nf * no * 2);
    for (std::size_t i = 1; i < jet.size(); i += 2) ASSERT_GE(jet[i], 0.0);
  }
}

TEST(GaborJet, ResizesToBankImageSize) {
  const GaborBank bank;
  const auto big = test::random_image(200, 150, 3);
  const auto direct = extract_gabor_jet(resize_image(big, 64, 64, ResizeMethod::Bilinear), bank);
  EXPECT_EQ(extract_gabor_jet(big, bank), direct);
}

TEST(ResponseStats, ShiftedTwoPass) {
  const std::vector<double> v{1e9 + 1, 1e9 + 2, 1e9 + 3};
  const auto s = response_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 1e9 + 2);
  EXPECT_NEAR(s.variance, 2.0 / 3.0, 1e-12);
}

}  // namespace
}  // namespace packscope
