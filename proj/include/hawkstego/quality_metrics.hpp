#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

#include "hawkstego/image_store.hpp"

namespace hawkstego {

/// PSNR of identical images. Returned explicitly when MSE is zero.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();
inline constexpr double kPsnrPeak = 255.0;

inline constexpr std::uint32_t kSsimWindow = 8;
inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);

struct ChannelHistogramDistance {
  std::int64_t l1 = 0;
  double chi_square = 0.0;
};

using HistogramComparison = std::array<ChannelHistogramDistance, RasterImage::kChannels>;

struct QualityReport {
  double mse = 0.0;
  double psnr = kInfinitePsnr;
  double ssim = 1.0;
  HistogramComparison histogram{};
};

double mse(const RasterImage& cover, const RasterImage& stego);

/// 10 log10(255^2 / MSE), or kInfinitePsnr for identical images.
double psnr(const RasterImage& cover, const RasterImage& stego);
double psnr_from_mse(double mse_value) noexcept;

/// Mean SSIM over every 8x8 luminance window (stride 1, uniform weights,
/// population statistics).
double ssim(const RasterImage& cover, const RasterImage& stego);

/// SSIM over two luminance planes of w x h pixels.
double ssim_luminance(std::span<const std::uint8_t> lx, std::span<const std::uint8_t> ly, std::uint32_t w,
                      std::uint32_t h);

HistogramComparison compare_histograms(const RasterImage& cover, const RasterImage& stego);

QualityReport quality_report(const RasterImage& cover, const RasterImage& stego);

/// Raw sums over one window; SSIM for the window follows exactly from these.
struct WindowSums {
  std::int64_t sx = 0;
  std::int64_t sy = 0;
  std::int64_t sxx = 0;
  std::int64_t syy = 0;
  std::int64_t sxy = 0;
};

/// SSIM of a single window of n pixels. Identical inputs (sx == sy,
/// sxx == syy == sxy) give exactly 1.0.
double window_ssim(const WindowSums& s, std::int64_t n) noexcept;

}  // namespace hawkstego
