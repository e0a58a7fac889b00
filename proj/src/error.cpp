#include "hawkstego/error.hpp"

namespace hawkstego {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedContainer: return "MalformedContainer";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::MalformedImage: return "MalformedImage";
    case ErrorKind::UnsupportedImage: return "UnsupportedImage";
    case ErrorKind::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::InvalidBounds: return "InvalidBounds";
    case ErrorKind::PlanInfeasible: return "PlanInfeasible";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::SlotOutOfBounds: return "SlotOutOfBounds";
    case ErrorKind::KeyMismatch: return "KeyMismatch";
    case ErrorKind::MalformedKey: return "MalformedKey";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace hawkstego
