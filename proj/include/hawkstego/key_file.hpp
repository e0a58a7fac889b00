#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hawkstego/image_store.hpp"

namespace hawkstego {

inline constexpr std::uint16_t kKeyVersion = 1;
/// Fixed part of a key file before the slot list.
inline constexpr std::size_t kKeyHeaderBytes = 36;
inline constexpr std::size_t kKeySlotBytes = 5;
inline constexpr std::size_t kKeyTrailerBytes = 4;

/// Everything the receiver needs to pull the payload back out of a stego image.
struct StegoKey {
  std::uint16_t version = kKeyVersion;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t lsb_depth = 1;
  std::uint64_t payload_bit_length = 0;
  std::vector<Slot> slots;

  friend bool operator==(const StegoKey&, const StegoKey&) = default;
};

/// Little-endian layout:
///   "SHWK-KEY" | version u16 | width u32 | height u32 | lsb_depth u8 |
///   reserved u8 | payload_bit_length u64 | slot_count u64 |
///   slot_count x (pixel_index u32, channel u8) | crc32 u32
/// The CRC covers every byte before it.
std::vector<std::uint8_t> write_key(const StegoKey& key);

/// Throws MalformedKey, VersionMismatch or ChecksumMismatch.
StegoKey read_key(std::span<const std::uint8_t> raw);

}  // namespace hawkstego
