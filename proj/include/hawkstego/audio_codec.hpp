#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hawkstego {

/// Decoded PCM audio: format metadata plus the raw bytes of the data chunk.
struct AudioPayload {
  std::uint32_t sample_rate = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits_per_sample = 0;
  std::vector<std::uint8_t> data;

  /// Throws UnsupportedFormat when the metadata or data length is invalid.
  void validate() const;

  friend bool operator==(const AudioPayload&, const AudioPayload&) = default;
};

/// Ordered bit sequence. Bits are stored one per element (0 or 1).
class BitStream {
 public:
  BitStream() = default;
  explicit BitStream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  /// Serializes bytes most-significant bit first.
  static BitStream from_bytes(std::span<const std::uint8_t> bytes);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void push_back(std::uint8_t bit) { bits_.push_back(bit & 1U); }
  void flip(std::size_t i) { bits_.at(i) ^= 1U; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// Packs MSB-first. A trailing partial byte is zero-padded.
  std::vector<std::uint8_t> to_bytes() const;

  friend bool operator==(const BitStream&, const BitStream&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Frame header size in bytes: magic, version, reserved, format, data length, crc, reserved.
inline constexpr std::size_t kFrameHeaderBytes = 24;
inline constexpr std::uint8_t kFrameVersion = 1;

/// IEEE CRC-32 (the zlib polynomial).
std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

AudioPayload parse_wav(std::span<const std::uint8_t> raw);
std::vector<std::uint8_t> write_wav(const AudioPayload& payload);

/// Framed bit count for a payload of data_len bytes.
constexpr std::size_t framed_bit_length(std::size_t data_len) noexcept {
  return (kFrameHeaderBytes + data_len) * 8;
}

BitStream frame_payload(const AudioPayload& payload);
AudioPayload deframe_payload(const BitStream& bits);

}  // namespace hawkstego
