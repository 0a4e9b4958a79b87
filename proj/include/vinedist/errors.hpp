#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vinedist {

enum class ErrorKind {
  DanglingFace,
  DimensionMismatch,
  DuplicateCell,
  InvalidBoundary,
  MissingVertexValue,
  NotVertexBased,
  AsymmetricMatrix,
  NegativeDistance,
  EmptyGrid,
  ComplexMismatch,
  NonMonotoneFunction,
  EmptySequence,
  DomainMismatch,
  UnknownColumn,
  UnsupportedWeighting,
  InvalidArgument,
  ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DanglingFace: return "DanglingFace";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::InvalidBoundary: return "InvalidBoundary";
    case ErrorKind::MissingVertexValue: return "MissingVertexValue";
    case ErrorKind::NotVertexBased: return "NotVertexBased";
    case ErrorKind::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorKind::NegativeDistance: return "NegativeDistance";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::ComplexMismatch: return "ComplexMismatch";
    case ErrorKind::NonMonotoneFunction: return "NonMonotoneFunction";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::UnsupportedWeighting: return "UnsupportedWeighting";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Validation failure on user-supplied data. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace vinedist
