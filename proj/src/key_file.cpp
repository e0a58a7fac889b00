#include "hawkstego/key_file.hpp"

#include <algorithm>
#include <string>

#include "byte_io.hpp"
#include "hawkstego/audio_codec.hpp"
#include "hawkstego/error.hpp"

namespace hawkstego {

namespace {

constexpr std::string_view kKeyMagic = "SHWK-KEY";

}  // namespace

std::vector<std::uint8_t> write_key(const StegoKey& key) {
  detail::ByteWriter out;
  out.tag(kKeyMagic);
  out.u16(key.version);
  out.u32(key.width);
  out.u32(key.height);
  out.u8(key.lsb_depth);
  out.u8(0);
  out.u64(key.payload_bit_length);
  out.u64(key.slots.size());
  for (const Slot& s : key.slots) {
    out.u32(s.pixel_index);
    out.u8(s.channel);
  }
  out.u32(crc32(out.view()));
  return out.take();
}

StegoKey read_key(std::span<const std::uint8_t> raw) {
  if (raw.size() < kKeyHeaderBytes + kKeyTrailerBytes) {
    throw Error(ErrorKind::MalformedKey, "key file is shorter than its fixed header");
  }
  detail::ByteReader in(raw);
  if (!in.tag(kKeyMagic)) throw Error(ErrorKind::MalformedKey, "missing SHWK-KEY magic");
  StegoKey key;
  key.version = in.u16();
  if (key.version != kKeyVersion) {
    throw Error(ErrorKind::VersionMismatch, "key version " + std::to_string(key.version));
  }
  key.width = in.u32();
  key.height = in.u32();
  key.lsb_depth = in.u8();
  in.u8();
  key.payload_bit_length = in.u64();
  const std::uint64_t slot_count = in.u64();
  const std::uint64_t body = raw.size() - kKeyHeaderBytes - kKeyTrailerBytes;
  if (body % kKeySlotBytes != 0 || body / kKeySlotBytes != slot_count) {
    throw Error(ErrorKind::MalformedKey, "slot count does not match the key file size");
  }
  const std::uint32_t stored_crc =
      detail::ByteReader(raw.subspan(raw.size() - kKeyTrailerBytes)).u32();
  if (crc32(raw.first(raw.size() - kKeyTrailerBytes)) != stored_crc) {
    throw Error(ErrorKind::ChecksumMismatch, "key file CRC-32 does not match its contents");
  }

  key.slots.resize(slot_count);
  for (Slot& s : key.slots) {
    s.pixel_index = in.u32();
    s.channel = in.u8();
  }

  if (key.lsb_depth != 1 && key.lsb_depth != 2) throw Error(ErrorKind::MalformedKey, "lsb_depth must be 1 or 2");
  const std::uint64_t needed = (key.payload_bit_length + key.lsb_depth - 1) / key.lsb_depth;
  if (needed != slot_count) {
    throw Error(ErrorKind::MalformedKey, "slot count does not match payload length and depth");
  }
  const std::uint64_t pixels = std::uint64_t{key.width} * key.height;
  for (const Slot& s : key.slots) {
    if (s.pixel_index >= pixels || s.channel >= RasterImage::kChannels) {
      throw Error(ErrorKind::MalformedKey, "slot lies outside the declared image");
    }
  }
  std::vector<Slot> sorted = key.slots;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::MalformedKey, "slot list repeats a slot");
  }
  return key;
}

}  // namespace hawkstego
