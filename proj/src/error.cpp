#include "anosov/error.hpp"

namespace anosov {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoGap: return "NoGap";
    case ErrorKind::RankOverflow: return "RankOverflow";
    case ErrorKind::UnknownLetter: return "UnknownLetter";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::BallTooLarge: return "BallTooLarge";
    case ErrorKind::NoGapAlongRay: return "NoGapAlongRay";
    case ErrorKind::NotCertified: return "NotCertified";
    case ErrorKind::InsufficientDepth: return "InsufficientDepth";
    case ErrorKind::NotTransverse: return "NotTransverse";
    case ErrorKind::DegenerateAxes: return "DegenerateAxes";
    case ErrorKind::NotAnSl2Module: return "NotAnSl2Module";
    case ErrorKind::DegenerateTriple: return "DegenerateTriple";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::ScaleRangeEmpty: return "ScaleRangeEmpty";
    case ErrorKind::EmptyShadow: return "EmptyShadow";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace anosov
