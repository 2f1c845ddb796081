#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gyrodeblur {

enum class ErrorCode {
  // parsing / file formats
  MalformedLine,
  NonMonotonicTimestamps,
  EmptyTrack,
  MissingField,
  InvalidValue,
  BadMagic,
  TruncatedData,
  // numeric / domain
  OutOfRange,
  InvalidStep,
  SingularResult,
  RowOutOfRange,
  PointAtInfinity,
  DimensionMismatch,
  InvalidIters,
  InvalidParameter,
  TooSmall,
  TrackTooShort,
  // filesystem
  IoError,
  NoImagesFound,
  NoTracksFound,
};

enum class ErrorClass { Format, Domain, Io };

constexpr ErrorClass error_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine:
    case ErrorCode::NonMonotonicTimestamps:
    case ErrorCode::EmptyTrack:
    case ErrorCode::MissingField:
    case ErrorCode::InvalidValue:
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedData:
      return ErrorClass::Format;
    case ErrorCode::IoError:
    case ErrorCode::NoImagesFound:
    case ErrorCode::NoTracksFound:
      return ErrorClass::Io;
    default:
      return ErrorClass::Domain;
  }
}

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::EmptyTrack: return "EmptyTrack";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidStep: return "InvalidStep";
    case ErrorCode::SingularResult: return "SingularResult";
    case ErrorCode::RowOutOfRange: return "RowOutOfRange";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidIters: return "InvalidIters";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::TrackTooShort: return "TrackTooShort";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NoImagesFound: return "NoImagesFound";
    case ErrorCode::NoTracksFound: return "NoTracksFound";
  }
  return "Unknown";
}

}  // namespace gyrodeblur
