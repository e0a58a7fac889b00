#include "hawkstego/audio_codec.hpp"

#include <zlib.h>

#include <limits>
#include <optional>
#include <string>

#include "byte_io.hpp"
#include "hawkstego/error.hpp"

namespace hawkstego {

namespace {

constexpr std::string_view kFrameMagic = "SHWK";
constexpr std::uint16_t kPcmFormatTag = 1;

bool supported_format(std::uint32_t sample_rate, std::uint16_t channels, std::uint16_t bits) {
  return sample_rate > 0 && (channels == 1 || channels == 2) && (bits == 8 || bits == 16);
}

std::size_t block_align(std::uint16_t channels, std::uint16_t bits) {
  return std::size_t{channels} * (bits / 8U);
}

struct FmtChunk {
  std::uint16_t format_tag;
  std::uint16_t channels;
  std::uint32_t sample_rate;
  std::uint16_t bits_per_sample;
};

}  // namespace

void AudioPayload::validate() const {
  if (!supported_format(sample_rate, channels, bits_per_sample)) {
    throw Error(ErrorKind::InvalidArgument,
                "audio format must be PCM 8/16-bit, 1-2 channels, positive sample rate");
  }
  if (data.size() % block_align(channels, bits_per_sample) != 0) {
    throw Error(ErrorKind::InvalidArgument, "audio data length is not a whole number of frames");
  }
}

BitStream BitStream::from_bytes(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> bits;
  bits.reserve(bytes.size() * 8);
  for (std::uint8_t byte : bytes) {
    for (int shift = 7; shift >= 0; --shift) bits.push_back((byte >> shift) & 1U);
  }
  return BitStream(std::move(bits));
}

std::vector<std::uint8_t> BitStream::to_bytes() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out[i / 8] |= static_cast<std::uint8_t>(bits_[i] << (7 - i % 8));
  }
  return out;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in pieces.
  constexpr std::size_t kChunk = 1U << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

AudioPayload parse_wav(std::span<const std::uint8_t> raw) {
  detail::ByteReader in(raw);
  if (in.remaining() < 12) throw Error(ErrorKind::MalformedContainer, "file shorter than RIFF header");
  if (!in.tag("RIFF")) throw Error(ErrorKind::MalformedContainer, "missing RIFF magic");
  in.u32();  // RIFF size; chunk walking below relies on real bounds instead
  if (!in.tag("WAVE")) throw Error(ErrorKind::MalformedContainer, "missing WAVE form type");

  std::optional<FmtChunk> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  while (in.remaining() >= 8 && !(fmt && data)) {
    auto id = in.bytes(4);
    std::uint32_t size = in.u32();
    if (size > in.remaining()) {
      throw Error(ErrorKind::MalformedContainer, "chunk extends past end of file");
    }
    std::string chunk_id(id.begin(), id.end());
    if (chunk_id == "fmt ") {
      if (size < 16) throw Error(ErrorKind::MalformedContainer, "fmt chunk shorter than 16 bytes");
      detail::ByteReader body(in.bytes(size));
      FmtChunk f{};
      f.format_tag = body.u16();
      f.channels = body.u16();
      f.sample_rate = body.u32();
      body.u32();  // byte rate
      body.u16();  // block align
      f.bits_per_sample = body.u16();
      fmt = f;
    } else if (chunk_id == "data") {
      data = in.bytes(size);
    } else {
      in.skip(size);
    }
    if (size % 2 == 1 && in.remaining() > 0) in.skip(1);
  }
  if (!fmt) throw Error(ErrorKind::MalformedContainer, "no fmt chunk");
  if (!data) throw Error(ErrorKind::MalformedContainer, "no data chunk");
  if (fmt->format_tag != kPcmFormatTag) {
    throw Error(ErrorKind::UnsupportedFormat,
                "format tag " + std::to_string(fmt->format_tag) + " is not PCM");
  }
  if (!supported_format(fmt->sample_rate, fmt->channels, fmt->bits_per_sample)) {
    throw Error(ErrorKind::UnsupportedFormat,
                std::to_string(fmt->channels) + " channel(s) at " +
                    std::to_string(fmt->bits_per_sample) + " bits/sample is not supported");
  }
  if (data->size() % block_align(fmt->channels, fmt->bits_per_sample) != 0) {
    throw Error(ErrorKind::MalformedContainer, "data chunk holds a partial sample frame");
  }
  return AudioPayload{fmt->sample_rate, fmt->channels, fmt->bits_per_sample,
                      std::vector<std::uint8_t>(data->begin(), data->end())};
}

std::vector<std::uint8_t> write_wav(const AudioPayload& payload) {
  payload.validate();
  if (payload.data.size() > std::numeric_limits<std::uint32_t>::max() - 44) {
    throw Error(ErrorKind::PayloadTooLarge, "audio data does not fit a RIFF container");
  }
  const auto data_len = static_cast<std::uint32_t>(payload.data.size());
  const std::uint32_t pad = data_len % 2;
  const auto align = static_cast<std::uint16_t>(block_align(payload.channels, payload.bits_per_sample));

  detail::ByteWriter out;
  out.tag("RIFF");
  out.u32(36 + data_len + pad);
  out.tag("WAVE");
  out.tag("fmt ");
  out.u32(16);
  out.u16(kPcmFormatTag);
  out.u16(payload.channels);
  out.u32(payload.sample_rate);
  out.u32(payload.sample_rate * align);
  out.u16(align);
  out.u16(payload.bits_per_sample);
  out.tag("data");
  out.u32(data_len);
  out.bytes(payload.data);
  if (pad) out.u8(0);
  return out.take();
}

BitStream frame_payload(const AudioPayload& payload) {
  payload.validate();
  if (payload.data.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::PayloadTooLarge, "data length must be below 2^32 bytes");
  }
  detail::ByteWriter out;
  out.tag(kFrameMagic);
  out.u8(kFrameVersion);
  out.u8(0);
  out.u32(payload.sample_rate);
  out.u16(payload.channels);
  out.u16(payload.bits_per_sample);
  out.u32(static_cast<std::uint32_t>(payload.data.size()));
  out.u32(crc32(payload.data));
  out.u16(0);
  out.bytes(payload.data);
  return BitStream::from_bytes(out.view());
}

AudioPayload deframe_payload(const BitStream& bits) {
  auto byte_at = [&bits](std::size_t index) {
    std::uint8_t v = 0;
    for (std::size_t b = 0; b < 8; ++b) v = static_cast<std::uint8_t>((v << 1) | bits[index * 8 + b]);
    return v;
  };
  if (bits.size() < 32) throw Error(ErrorKind::LengthMismatch, "stream shorter than frame magic");
  std::vector<std::uint8_t> header;
  for (std::size_t i = 0; i < std::min(kFrameHeaderBytes, bits.size() / 8); ++i) {
    header.push_back(byte_at(i));
  }
  detail::ByteReader in(header);
  if (!in.tag(kFrameMagic)) throw Error(ErrorKind::BadMagic, "stream does not start with SHWK");
  if (in.remaining() < 1) throw Error(ErrorKind::LengthMismatch, "stream ends inside frame header");
  if (std::uint8_t version = in.u8(); version != kFrameVersion) {
    throw Error(ErrorKind::VersionMismatch, "frame version " + std::to_string(version));
  }
  if (header.size() < kFrameHeaderBytes) {
    throw Error(ErrorKind::LengthMismatch, "stream ends inside frame header");
  }
  in.u8();
  AudioPayload out;
  out.sample_rate = in.u32();
  out.channels = in.u16();
  out.bits_per_sample = in.u16();
  const std::uint32_t data_len = in.u32();
  const std::uint32_t expected_crc = in.u32();

  if (bits.size() < framed_bit_length(data_len)) {
    throw Error(ErrorKind::LengthMismatch,
                "frame declares " + std::to_string(framed_bit_length(data_len)) + " bits but only " +
                    std::to_string(bits.size()) + " are available");
  }
  out.data.resize(data_len);
  for (std::size_t i = 0; i < data_len; ++i) out.data[i] = byte_at(kFrameHeaderBytes + i);
  if (crc32(out.data) != expected_crc) {
    throw Error(ErrorKind::ChecksumMismatch, "payload CRC-32 does not match frame header");
  }
  // The header itself carries no checksum; a corrupted format field shows up here.
  if (!supported_format(out.sample_rate, out.channels, out.bits_per_sample) ||
      data_len % block_align(out.channels, out.bits_per_sample) != 0) {
    throw Error(ErrorKind::ChecksumMismatch, "frame header carries an invalid audio format");
  }
  return out;
}

}  // namespace hawkstego
