#include "hawkstego/quality_metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brute_force_metrics.hpp"
#include "test_support.hpp"

namespace hawkstego {
namespace {

using testing::constant_image;

RasterImage tiny() { return RasterImage(2, 2, {255, 0, 0, 0, 255, 0, 0, 0, 255, 12, 34, 56}); }

TEST(Mse, Examples) {
  const RasterImage a = tiny();
  EXPECT_EQ(mse(a, a), 0.0);
  RasterImage b = a;
  b.at(3, 1) = 35;
  EXPECT_DOUBLE_EQ(mse(a, b), 1.0 / 12.0);

  RasterImage c = constant_image(5, 4, 10, 20, 30);
  RasterImage d = constant_image(5, 4, 12, 18, 32);
  EXPECT_DOUBLE_EQ(mse(c, d), 4.0);
}

TEST(Mse, DimensionMismatch) { EXPECT_ERROR_KIND(mse(RasterImage(2, 2), RasterImage(2, 3)), DimensionMismatch); }

TEST(Psnr, Examples) {
  const RasterImage a = tiny();
  EXPECT_TRUE(std::isinf(psnr(a, a)));
  EXPECT_GT(psnr(a, a), 0.0);
  EXPECT_NEAR(psnr_from_mse(1.0), 48.1308036086791, 1e-12);
  EXPECT_NEAR(psnr_from_mse(16256.25), 6.020599913279624, 1e-12);
  EXPECT_ERROR_KIND(psnr(RasterImage(2, 2), RasterImage(3, 2)), DimensionMismatch);
}

TEST(Psnr, StrictlyDecreasingInMse) {
  double previous = psnr_from_mse(1e-6);
  for (double m = 1e-5; m < 70000.0; m *= 1.7) {
    const double current = psnr_from_mse(m);
    EXPECT_LT(current, previous);
    previous = current;
  }
}

TEST(Ssim, Examples) {
  std::mt19937_64 rng(1);
  const RasterImage a = testing::noise_image(12, 9, rng);
  EXPECT_EQ(ssim(a, a), 1.0);

  const double expected = kSsimC1 / (255.0 * 255.0 + kSsimC1);
  EXPECT_NEAR(ssim(constant_image(8, 8, 0, 0, 0), constant_image(8, 8, 255, 255, 255)), expected, 1e-15);
  EXPECT_NEAR(expected, 9.999000099990003e-05, 1e-18);
}

TEST(Ssim, Errors) {
  EXPECT_ERROR_KIND(ssim(RasterImage(7, 8), RasterImage(7, 8)), ImageTooSmall);
  EXPECT_ERROR_KIND(ssim(RasterImage(8, 8), RasterImage(9, 8)), DimensionMismatch);
}

TEST(Ssim, WindowOfIdenticalSumsIsExactlyOne) {
  const WindowSums s{1000, 1000, 40000, 40000, 40000};
  EXPECT_EQ(window_ssim(s, 64), 1.0);
}

TEST(CompareHistograms, Examples) {
  const RasterImage a = tiny();
  for (const auto& h : compare_histograms(a, a)) {
    EXPECT_EQ(h.l1, 0);
    EXPECT_EQ(h.chi_square, 0.0);
  }
  RasterImage b = a;
  b.at(0, 0) = 254;
  const auto hist = compare_histograms(a, b);
  EXPECT_EQ(hist[0].l1, 2);
  // bins 255 and 254 each hold one count in exactly one image: 1/1 + 1/1
  EXPECT_DOUBLE_EQ(hist[0].chi_square, 2.0);
  EXPECT_EQ(hist[1].l1, 0);
  EXPECT_EQ(hist[2].l1, 0);
}

TEST(CompareHistogramsProperty, LsbFlipsBoundL1) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> channel(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const RasterImage a = testing::noise_image(20, 20, rng);
    RasterImage b = a;
    std::array<std::int64_t, 3> flips{};
    std::uniform_int_distribution<std::size_t> pixel(0, a.pixel_count() - 1);
    for (int k = 0; k < trial * 5; ++k) {
      const int c = channel(rng);
      b.at(pixel(rng), c) ^= 1;
      ++flips[c];
    }
    const auto hist = compare_histograms(a, b);
    for (int c = 0; c < 3; ++c) EXPECT_LE(hist[c].l1, 2 * flips[c]);
  }
}

TEST(MetricsProperty, Symmetry) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const RasterImage a = testing::noise_image(16, 12, rng);
    const RasterImage b = testing::noise_image(16, 12, rng);
    EXPECT_EQ(mse(a, b), mse(b, a));
    EXPECT_DOUBLE_EQ(ssim(a, b), ssim(b, a));
    const auto ab = compare_histograms(a, b);
    const auto ba = compare_histograms(b, a);
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(ab[c].l1, ba[c].l1);
      EXPECT_DOUBLE_EQ(ab[c].chi_square, ba[c].chi_square);
    }
  }
}

TEST(MetricsProperty, OneLsbFlipChangesMseByOneOverValueCount) {
  std::mt19937_64 rng(4);
  const RasterImage a = testing::noise_image(13, 7, rng);
  RasterImage b = a;
  b.at(17, 2) ^= 1;
  EXPECT_DOUBLE_EQ(mse(a, b), 1.0 / (13.0 * 7.0 * 3.0));
}

TEST(MetricsOracle, MatchesBruteForceEvaluator) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint32_t> dim(8, 24);
  std::uniform_int_distribution<int> delta(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t w = dim(rng);
    const std::uint32_t h = dim(rng);
    const RasterImage a = trial % 2 ? testing::noise_image(w, h, rng) : testing::textured_image(w, h, rng);
    RasterImage b = a;
    for (auto& v : b.values()) v = static_cast<std::uint8_t>(std::clamp(v + delta(rng), 0, 255));
    EXPECT_TRUE(oracle::within_relative(mse(a, b), oracle::brute_mse(a, b), 1e-12));
    EXPECT_TRUE(oracle::within_relative(psnr(a, b), oracle::brute_psnr(a, b), 1e-12));
    EXPECT_TRUE(oracle::within_relative(ssim(a, b), oracle::brute_ssim(a, b), 1e-12))
        << ssim(a, b) << " vs " << oracle::brute_ssim(a, b);
  }
}

TEST(QualityReport, CombinesAllMetrics) {
  const RasterImage a = constant_image(10, 10, 100, 100, 100);
  RasterImage b = a;
  b.at(5, 0) = 101;
  const QualityReport r = quality_report(a, b);
  EXPECT_DOUBLE_EQ(r.mse, 1.0 / 300.0);
  EXPECT_DOUBLE_EQ(r.psnr, psnr_from_mse(r.mse));
  EXPECT_LE(r.ssim, 1.0);
  EXPECT_EQ(r.histogram[0].l1, 2);

  const QualityReport same = quality_report(a, a);
  EXPECT_EQ(same.mse, 0.0);
  EXPECT_TRUE(std::isinf(same.psnr));
  EXPECT_EQ(same.ssim, 1.0);
}

}  // namespace
}  // namespace hawkstego
