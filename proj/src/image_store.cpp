#include "hawkstego/image_store.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <string>

#include "byte_io.hpp"
#include "hawkstego/error.hpp"

namespace hawkstego {

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 28;

void check_dims(std::uint64_t width, std::uint64_t height, ErrorKind kind) {
  if (width == 0 || height == 0) throw Error(kind, "image has a zero dimension");
  if (width * height > kMaxPixels) throw Error(kind, "image exceeds the 2^28 pixel limit");
}

bool starts_with(std::span<const std::uint8_t> raw, std::initializer_list<std::uint8_t> magic) {
  return raw.size() >= magic.size() && std::equal(magic.begin(), magic.end(), raw.begin());
}

// libpng reports errors through longjmp. Nothing with a destructor lives in
// the frames it unwinds; the message is copied out before the jump.
struct PngIo {
  std::span<const std::uint8_t> in;
  std::size_t pos = 0;
  std::vector<std::uint8_t>* out = nullptr;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  bool unsupported = false;
  char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* io = static_cast<PngIo*>(png_get_error_ptr(png));
  std::snprintf(io->message, sizeof io->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

void png_read_from_span(png_structp png, png_bytep dst, png_size_t n) {
  auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
  if (io->in.size() - io->pos < n) png_error(png, "unexpected end of PNG data");
  std::memcpy(dst, io->in.data() + io->pos, n);
  io->pos += n;
}

void png_write_to_vector(png_structp png, png_bytep src, png_size_t n) {
  auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
  io->out->insert(io->out->end(), src, src + n);
}

void png_flush_noop(png_structp) {}

RasterImage decode_png(std::span<const std::uint8_t> raw) {
  PngIo io;
  io.in = raw;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &io, png_error_handler, png_warning_handler);
  if (!png) throw Error(ErrorKind::MalformedImage, "cannot allocate PNG decoder");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::MalformedImage, "cannot allocate PNG decoder");
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::MalformedImage, std::string("PNG decode failed: ") + io.message);
  }
  png_set_read_fn(png, &io, png_read_from_span);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  const bool rgb = color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA;
  if (depth != 8 || !(rgb || color == PNG_COLOR_TYPE_PALETTE)) {
    io.unsupported = true;
    std::snprintf(io.message, sizeof io.message, "color type %d at bit depth %d", color, depth);
  } else if (std::uint64_t{width} * height > kMaxPixels) {
    io.unsupported = true;
    std::snprintf(io.message, sizeof io.message, "image exceeds the 2^28 pixel limit");
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != std::size_t{width} * 3) png_error(png, "unexpected row layout");
    io.pixels.resize(std::size_t{width} * height * 3);
    io.rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) io.rows[y] = io.pixels.data() + std::size_t{y} * width * 3;
    png_read_image(png, io.rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (io.unsupported) throw Error(ErrorKind::UnsupportedImage, std::string("PNG ") + io.message);
  const auto w = static_cast<std::uint32_t>(io.rows.empty() ? 0 : io.pixels.size() / 3 / io.rows.size());
  return RasterImage(w, static_cast<std::uint32_t>(io.rows.size()), std::move(io.pixels));
}

RasterImage decode_bmp(std::span<const std::uint8_t> raw) {
  detail::ByteReader in(raw);
  if (in.remaining() < 14 + 40) throw Error(ErrorKind::MalformedImage, "BMP shorter than its headers");
  in.skip(2 + 4 + 4);
  const std::uint32_t pixel_offset = in.u32();
  const std::uint32_t dib_size = in.u32();
  if (dib_size < 40) throw Error(ErrorKind::UnsupportedImage, "BMP core headers are not supported");
  const auto width = static_cast<std::int32_t>(in.u32());
  const auto signed_height = static_cast<std::int32_t>(in.u32());
  in.u16();  // planes
  const std::uint16_t bit_count = in.u16();
  const std::uint32_t compression = in.u32();
  if (bit_count != 24) {
    throw Error(ErrorKind::UnsupportedImage, "BMP bit depth " + std::to_string(bit_count) + " (only 24-bit)");
  }
  if (compression != 0) throw Error(ErrorKind::UnsupportedImage, "compressed BMP");
  if (width <= 0 || signed_height == 0 || signed_height == INT32_MIN) {
    throw Error(ErrorKind::MalformedImage, "BMP has invalid dimensions");
  }
  const bool top_down = signed_height < 0;
  const auto height = static_cast<std::uint32_t>(top_down ? -signed_height : signed_height);
  check_dims(static_cast<std::uint32_t>(width), height, ErrorKind::UnsupportedImage);

  const std::size_t stride = (std::size_t{static_cast<std::uint32_t>(width)} * 3 + 3) & ~std::size_t{3};
  if (pixel_offset > raw.size() || raw.size() - pixel_offset < stride * height) {
    throw Error(ErrorKind::MalformedImage, "BMP pixel array is truncated");
  }
  RasterImage img(static_cast<std::uint32_t>(width), height);
  for (std::uint32_t row = 0; row < height; ++row) {
    const std::uint32_t y = top_down ? row : height - 1 - row;
    const std::uint8_t* src = raw.data() + pixel_offset + row * stride;
    for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(width); ++x) {
      const std::size_t p = std::size_t{y} * width + x;
      img.at(p, 0) = src[3 * x + 2];
      img.at(p, 1) = src[3 * x + 1];
      img.at(p, 2) = src[3 * x + 0];
    }
  }
  return img;
}

}  // namespace

RasterImage::RasterImage(std::uint32_t width, std::uint32_t height)
    : RasterImage(width, height, std::vector<std::uint8_t>(std::size_t{width} * height * kChannels, 0)) {}

RasterImage::RasterImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width == 0 || height == 0) throw Error(ErrorKind::InvalidArgument, "image dimensions must be positive");
  if (values_.size() != std::size_t{width} * height * kChannels) {
    throw Error(ErrorKind::InvalidArgument, "value count must equal width * height * 3");
  }
}

std::vector<std::uint8_t> luminance_plane(const RasterImage& img) {
  std::vector<std::uint8_t> out(img.pixel_count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = static_cast<std::uint8_t>(luminance(img.at(p, 0), img.at(p, 1), img.at(p, 2)));
  }
  return out;
}

RasterImage load_image(std::span<const std::uint8_t> raw) {
  if (starts_with(raw, {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'})) return decode_png(raw);
  if (starts_with(raw, {'B', 'M'})) return decode_bmp(raw);
  if (starts_with(raw, {0xFF, 0xD8, 0xFF})) {
    throw Error(ErrorKind::UnsupportedImage, "JPEG is lossy and cannot carry LSB payloads");
  }
  if (starts_with(raw, {'G', 'I', 'F', '8'})) throw Error(ErrorKind::UnsupportedImage, "GIF is not supported");
  if (raw.size() >= 12 && starts_with(raw, {'R', 'I', 'F', 'F'}) &&
      std::memcmp(raw.data() + 8, "WEBP", 4) == 0) {
    throw Error(ErrorKind::UnsupportedImage, "WebP is not supported");
  }
  throw Error(ErrorKind::MalformedImage, "unrecognized image container");
}

std::vector<std::uint8_t> save_image(const RasterImage& img) {
  check_dims(img.width(), img.height(), ErrorKind::InvalidArgument);
  std::vector<std::uint8_t> out;
  PngIo io;
  io.out = &out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &io, png_error_handler, png_warning_handler);
  if (!png) throw Error(ErrorKind::Io, "cannot allocate PNG encoder");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::Io, "cannot allocate PNG encoder");
  }
  std::vector<png_bytep> rows(img.height());
  auto* base = const_cast<std::uint8_t*>(img.values().data());
  for (std::uint32_t y = 0; y < img.height(); ++y) rows[y] = base + std::size_t{y} * img.width() * 3;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, std::string("PNG encode failed: ") + io.message);
  }
  png_set_write_fn(png, &io, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

VarianceMap block_variance_map(const RasterImage& img, std::uint32_t block_size) {
  if (block_size == 0) throw Error(ErrorKind::InvalidArgument, "block_size must be at least 1");
  VarianceMap map;
  map.block_size = block_size;
  map.blocks_x = (img.width() + block_size - 1) / block_size;
  map.blocks_y = (img.height() + block_size - 1) / block_size;
  std::vector<std::int64_t> sum(std::size_t{map.blocks_x} * map.blocks_y, 0);
  std::vector<std::int64_t> sum_sq(sum.size(), 0);
  std::vector<std::int64_t> count(sum.size(), 0);

  const auto lum = luminance_plane(img);
  for (std::uint32_t y = 0; y < img.height(); ++y) {
    const std::size_t block_row = std::size_t{y / block_size} * map.blocks_x;
    for (std::uint32_t x = 0; x < img.width(); ++x) {
      const std::int64_t l = lum[std::size_t{y} * img.width() + x];
      const std::size_t b = block_row + x / block_size;
      sum[b] += l;
      sum_sq[b] += l * l;
      ++count[b];
    }
  }
  map.variances.resize(sum.size());
  for (std::size_t b = 0; b < sum.size(); ++b) {
    // n^2 Var = n * sum(x^2) - sum(x)^2, exact in integers
    const std::int64_t n = count[b];
    map.variances[b] = static_cast<double>(n * sum_sq[b] - sum[b] * sum[b]) / static_cast<double>(n * n);
  }
  return map;
}

std::vector<std::size_t> select_blocks(const VarianceMap& vmap, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "top_fraction must lie in (0, 1]");
  }
  const std::size_t n = vmap.block_count();
  // The epsilon keeps products like 0.3 * 10 from rounding up to an extra block.
  auto keep = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n) - 1e-9));
  keep = std::min(keep, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vmap.variances[a] > vmap.variances[b]; });
  order.resize(keep);
  return order;
}

CandidateSet candidate_positions(const VarianceMap& vmap, const RasterImage& img, double top_fraction) {
  if (vmap.blocks_x != (img.width() + vmap.block_size - 1) / std::max(vmap.block_size, 1U) ||
      vmap.blocks_y != (img.height() + vmap.block_size - 1) / std::max(vmap.block_size, 1U)) {
    throw Error(ErrorKind::InvalidArgument, "variance map was not computed from this image");
  }
  CandidateSet set;
  set.width = img.width();
  set.height = img.height();
  const std::uint32_t bs = vmap.block_size;
  for (std::size_t block : select_blocks(vmap, top_fraction)) {
    const std::uint32_t x0 = static_cast<std::uint32_t>(block % vmap.blocks_x) * bs;
    const std::uint32_t y0 = static_cast<std::uint32_t>(block / vmap.blocks_x) * bs;
    const std::uint32_t x1 = std::min(x0 + bs, img.width());
    const std::uint32_t y1 = std::min(y0 + bs, img.height());
    for (std::uint32_t y = y0; y < y1; ++y) {
      for (std::uint32_t x = x0; x < x1; ++x) {
        const auto pixel = static_cast<std::uint32_t>(std::size_t{y} * img.width() + x);
        for (std::uint8_t c = 0; c < RasterImage::kChannels; ++c) set.slots.push_back({pixel, c});
      }
    }
  }
  if (set.slots.empty()) throw Error(ErrorKind::EmptyCandidateSet, "no blocks selected for embedding");
  return set;
}

}  // namespace hawkstego
