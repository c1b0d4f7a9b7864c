#include "trinket/common/error.hpp"

namespace trinket {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::CropOutOfBounds: return "CropOutOfBounds";
    case ErrorCode::PyramidTooDeep: return "PyramidTooDeep";
    case ErrorCode::KeypointNearBorder: return "KeypointNearBorder";
    case ErrorCode::NotEnoughMatches: return "NotEnoughMatches";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::ReferenceSetTooSmall: return "ReferenceSetTooSmall";
    case ErrorCode::DegenerateTrainingSet: return "DegenerateTrainingSet";
    case ErrorCode::FeatureWidthMismatch: return "FeatureWidthMismatch";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::MissingCategories: return "MissingCategories";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::BadImage: return "BadImage";
    case ErrorCode::AlreadyEnrolled: return "AlreadyEnrolled";
    case ErrorCode::NotEnrolled: return "NotEnrolled";
    case ErrorCode::FallbackRequired: return "FallbackRequired";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace trinket
