#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hawkstego {

/// 8-bit RGB raster, row-major, channels interleaved (R,G,B per pixel).
class RasterImage {
 public:
  static constexpr int kChannels = 3;

  RasterImage() = default;
  /// Zero-filled image. Throws InvalidArgument on a zero dimension.
  RasterImage(std::uint32_t width, std::uint32_t height);
  RasterImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> values);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return std::size_t{width_} * height_; }
  std::size_t value_count() const noexcept { return values_.size(); }

  std::uint8_t at(std::size_t pixel, int channel) const { return values_[pixel * kChannels + channel]; }
  std::uint8_t& at(std::size_t pixel, int channel) { return values_[pixel * kChannels + channel]; }

  std::span<const std::uint8_t> values() const noexcept { return values_; }
  std::span<std::uint8_t> values() noexcept { return values_; }

  bool same_dims(const RasterImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> values_;
};

/// round(0.299 R + 0.587 G + 0.114 B), computed in exact integer arithmetic
/// with halves rounded up.
constexpr int luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return (299 * r + 587 * g + 114 * b + 500) / 1000;
}

/// Per-pixel luminance plane of an image.
std::vector<std::uint8_t> luminance_plane(const RasterImage& img);

/// Decodes PNG (8-bit RGB, RGBA, or 8-bit palette) or BMP (24-bit, uncompressed).
RasterImage load_image(std::span<const std::uint8_t> raw);

/// Encodes as 8-bit RGB PNG.
std::vector<std::uint8_t> save_image(const RasterImage& img);

struct VarianceMap {
  std::uint32_t block_size = 0;
  std::uint32_t blocks_x = 0;
  std::uint32_t blocks_y = 0;
  std::vector<double> variances;  ///< row-major block order

  std::size_t block_count() const noexcept { return variances.size(); }
};

/// Population variance of luminance within each block_size x block_size tile.
/// Tiles on the right and bottom edges may be smaller.
VarianceMap block_variance_map(const RasterImage& img, std::uint32_t block_size);

struct Slot {
  std::uint32_t pixel_index = 0;
  std::uint8_t channel = 0;

  friend bool operator==(const Slot&, const Slot&) = default;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

struct CandidateSet {
  std::vector<Slot> slots;
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  std::size_t size() const noexcept { return slots.size(); }
  bool empty() const noexcept { return slots.empty(); }
};

/// Indices of the ceil(top_fraction * block_count) highest-variance blocks,
/// in rank order (variance descending, block index ascending on ties).
std::vector<std::size_t> select_blocks(const VarianceMap& vmap, double top_fraction);

/// Every (pixel, channel) slot inside the selected blocks. Ordered by block
/// rank, then pixel index, then channel.
CandidateSet candidate_positions(const VarianceMap& vmap, const RasterImage& img, double top_fraction);

}  // namespace hawkstego
