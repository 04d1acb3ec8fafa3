#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linkarea {

enum class ErrorKind {
  InvalidInput,
  ParseError,
  NotSP,
  NotPTT,
  CrossingDiagonals,
  UnsupportedClass,
  NoSolution,
  NonGeneric,
  NotConcyclic,
  DegenerateCenter,
  DegenerateTriangle,
  NotAligned,
  CoincidingCenters,
  Degenerate,
  NotCritical,
  NoConvergence,
  CheckFailed,
  BranchLost,
  UnknownTopology,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotSP: return "NotSP";
    case ErrorKind::NotPTT: return "NotPTT";
    case ErrorKind::CrossingDiagonals: return "CrossingDiagonals";
    case ErrorKind::UnsupportedClass: return "UnsupportedClass";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::NonGeneric: return "NonGeneric";
    case ErrorKind::NotConcyclic: return "NotConcyclic";
    case ErrorKind::DegenerateCenter: return "DegenerateCenter";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::NotAligned: return "NotAligned";
    case ErrorKind::CoincidingCenters: return "CoincidingCenters";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotCritical: return "NotCritical";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::CheckFailed: return "CheckFailed";
    case ErrorKind::BranchLost: return "BranchLost";
    case ErrorKind::UnknownTopology: return "UnknownTopology";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }
}  // namespace detail

}  // namespace linkarea
