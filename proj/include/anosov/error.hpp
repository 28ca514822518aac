#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anosov {

enum class ErrorKind {
  InvalidArgument,
  SingularInput,
  IndexOutOfRange,
  DimensionMismatch,
  NoGap,
  RankOverflow,
  UnknownLetter,
  ParseError,
  ValidationError,
  BallTooLarge,
  NoGapAlongRay,
  NotCertified,
  InsufficientDepth,
  NotTransverse,
  DegenerateAxes,
  NotAnSl2Module,
  DegenerateTriple,
  EmptyIntersection,
  WindowTooShort,
  ScaleRangeEmpty,
  EmptyShadow,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace anosov
