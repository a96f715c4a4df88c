#pragma once

#include <stdexcept>
#include <string>

namespace lpflow {

// Failure categories. InvalidArgument covers configuration/validation problems;
// the rest are numerical conditions detected mid-computation.
enum class ErrorKind {
  InvalidArgument,
  CoincidentPoints,
  TubeTooWide,
  DegenerateCrossing,
  NotClosed,
  LiftAmbiguous,
  StepOut,
  NonIntegralWinding,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // True for conditions that signal a numerical failure rather than bad input.
  bool is_numerical() const {
    return kind_ != ErrorKind::InvalidArgument && kind_ != ErrorKind::Io;
  }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::TubeTooWide: return "TubeTooWide";
    case ErrorKind::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::LiftAmbiguous: return "LiftAmbiguous";
    case ErrorKind::StepOut: return "StepOut";
    case ErrorKind::NonIntegralWinding: return "NonIntegralWinding";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace lpflow
