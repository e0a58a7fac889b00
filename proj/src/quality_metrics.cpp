#include "hawkstego/quality_metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "hawkstego/error.hpp"

namespace hawkstego {

namespace {

void require_same_dims(const RasterImage& a, const RasterImage& b) {
  if (!a.same_dims(b)) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

// Summed-area table with a zero border row and column.
class IntegralImage {
 public:
  IntegralImage(std::uint32_t width, std::uint32_t height) : stride_(width + 1), table_(stride_ * (height + 1), 0) {}

  std::int64_t& at(std::size_t x, std::size_t y) { return table_[y * stride_ + x]; }

  std::int64_t box(std::size_t x0, std::size_t y0, std::size_t x1, std::size_t y1) const {
    return table_[y1 * stride_ + x1] - table_[y0 * stride_ + x1] - table_[y1 * stride_ + x0] +
           table_[y0 * stride_ + x0];
  }

 private:
  std::size_t stride_;
  std::vector<std::int64_t> table_;
};

}  // namespace

double mse(const RasterImage& cover, const RasterImage& stego) {
  require_same_dims(cover, stego);
  std::int64_t total = 0;
  const auto a = cover.values();
  const auto b = stego.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = int{a[i]} - int{b[i]};
    total += d * d;
  }
  return static_cast<double>(total) / static_cast<double>(a.size());
}

double psnr_from_mse(double mse_value) noexcept {
  if (mse_value == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(kPsnrPeak * kPsnrPeak / mse_value);
}

double psnr(const RasterImage& cover, const RasterImage& stego) { return psnr_from_mse(mse(cover, stego)); }

double window_ssim(const WindowSums& s, std::int64_t n) noexcept {
  const double nd = static_cast<double>(n);
  const double mu_x = static_cast<double>(s.sx) / nd;
  const double mu_y = static_cast<double>(s.sy) / nd;
  const double n2 = nd * nd;
  const double var_x = static_cast<double>(n * s.sxx - s.sx * s.sx) / n2;
  const double var_y = static_cast<double>(n * s.syy - s.sy * s.sy) / n2;
  const double cov = static_cast<double>(n * s.sxy - s.sx * s.sy) / n2;
  const double num = (2.0 * mu_x * mu_y + kSsimC1) * (2.0 * cov + kSsimC2);
  const double den = (mu_x * mu_x + mu_y * mu_y + kSsimC1) * (var_x + var_y + kSsimC2);
  return num / den;
}

double ssim(const RasterImage& cover, const RasterImage& stego) {
  require_same_dims(cover, stego);
  if (cover.width() < kSsimWindow || cover.height() < kSsimWindow) {
    throw Error(ErrorKind::ImageTooSmall, "SSIM needs at least 8x8 pixels");
  }
  return ssim_luminance(luminance_plane(cover), luminance_plane(stego), cover.width(), cover.height());
}

double ssim_luminance(std::span<const std::uint8_t> lx, std::span<const std::uint8_t> ly, std::uint32_t w,
                      std::uint32_t h) {
  if (w < kSsimWindow || h < kSsimWindow) {
    throw Error(ErrorKind::ImageTooSmall, "SSIM needs at least 8x8 pixels");
  }
  if (lx.size() != std::size_t{w} * h || ly.size() != lx.size()) {
    throw Error(ErrorKind::DimensionMismatch, "luminance planes do not match the stated size");
  }

  IntegralImage ix(w, h), iy(w, h), ixx(w, h), iyy(w, h), ixy(w, h);
  for (std::uint32_t y = 0; y < h; ++y) {
    std::int64_t rx = 0, ry = 0, rxx = 0, ryy = 0, rxy = 0;
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::int64_t a = lx[std::size_t{y} * w + x];
      const std::int64_t b = ly[std::size_t{y} * w + x];
      rx += a;
      ry += b;
      rxx += a * a;
      ryy += b * b;
      rxy += a * b;
      ix.at(x + 1, y + 1) = ix.at(x + 1, y) + rx;
      iy.at(x + 1, y + 1) = iy.at(x + 1, y) + ry;
      ixx.at(x + 1, y + 1) = ixx.at(x + 1, y) + rxx;
      iyy.at(x + 1, y + 1) = iyy.at(x + 1, y) + ryy;
      ixy.at(x + 1, y + 1) = ixy.at(x + 1, y) + rxy;
    }
  }

  constexpr std::int64_t n = std::int64_t{kSsimWindow} * kSsimWindow;
  double total = 0.0;
  for (std::uint32_t y = 0; y + kSsimWindow <= h; ++y) {
    for (std::uint32_t x = 0; x + kSsimWindow <= w; ++x) {
      const std::size_t x1 = x + kSsimWindow;
      const std::size_t y1 = y + kSsimWindow;
      WindowSums s{ix.box(x, y, x1, y1), iy.box(x, y, x1, y1), ixx.box(x, y, x1, y1), iyy.box(x, y, x1, y1),
                   ixy.box(x, y, x1, y1)};
      total += window_ssim(s, n);
    }
  }
  const double windows = static_cast<double>(w - kSsimWindow + 1) * static_cast<double>(h - kSsimWindow + 1);
  return total / windows;
}

HistogramComparison compare_histograms(const RasterImage& cover, const RasterImage& stego) {
  require_same_dims(cover, stego);
  HistogramComparison out{};
  for (int c = 0; c < RasterImage::kChannels; ++c) {
    std::array<std::int64_t, 256> ha{}, hb{};
    for (std::size_t p = 0; p < cover.pixel_count(); ++p) {
      ++ha[cover.at(p, c)];
      ++hb[stego.at(p, c)];
    }
    for (std::size_t bin = 0; bin < 256; ++bin) {
      const std::int64_t d = ha[bin] - hb[bin];
      out[c].l1 += std::llabs(d);
      const std::int64_t total = ha[bin] + hb[bin];
      if (total > 0) out[c].chi_square += static_cast<double>(d * d) / static_cast<double>(total);
    }
  }
  return out;
}

QualityReport quality_report(const RasterImage& cover, const RasterImage& stego) {
  QualityReport r;
  r.mse = mse(cover, stego);
  r.psnr = psnr_from_mse(r.mse);
  r.ssim = ssim(cover, stego);
  r.histogram = compare_histograms(cover, stego);
  return r;
}

}  // namespace hawkstego
