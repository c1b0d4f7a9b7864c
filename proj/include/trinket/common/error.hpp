#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trinket {

enum class ErrorCode {
  DegenerateImage,
  CropOutOfBounds,
  PyramidTooDeep,
  KeypointNearBorder,
  NotEnoughMatches,
  DegenerateGeometry,
  ReferenceSetTooSmall,
  DegenerateTrainingSet,
  FeatureWidthMismatch,
  UndefinedMetric,
  ShapeError,
  MissingCategories,
  BadRequest,
  BadImage,
  AlreadyEnrolled,
  NotEnrolled,
  FallbackRequired,
  IoError,
  FormatError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the HTTP layer in particular) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trinket
