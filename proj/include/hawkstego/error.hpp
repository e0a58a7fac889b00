#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hawkstego {

/// Failure categories shared by every module. The CLI maps these onto exit
/// codes, so the set is stable.
enum class ErrorKind {
  // audio_codec
  MalformedContainer,
  UnsupportedFormat,
  PayloadTooLarge,
  BadMagic,
  VersionMismatch,
  LengthMismatch,
  ChecksumMismatch,
  // image_store
  MalformedImage,
  UnsupportedImage,
  EmptyCandidateSet,
  // quality_metrics
  DimensionMismatch,
  ImageTooSmall,
  // optimizer_core
  InvalidBounds,
  // stego_engine
  PlanInfeasible,
  CapacityExceeded,
  SlotOutOfBounds,
  KeyMismatch,
  MalformedKey,
  // shared
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hawkstego
