#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slfv {

/// Failure categories raised by the library. Each maps to one recoverable or
/// fatal condition named in the module contracts.
enum class ErrorCode {
  InvalidArgument,
  InvalidDomain,
  HoleInsideCell,
  DegenerateTangency,
  MultipleCutLoops,
  MergeFailure,
  AnchorNotFound,
  NegativeJacobian,
  UnsupportedOrder,
  NonFiniteVelocity,
  NoConvergence,
  TouchesBoundary,
  InsufficientCells,
  RankDeficient,
  PreimageUnresolvable,
  ZeroInitialMass,
  UnknownCase,
  GridMismatch,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::HoleInsideCell: return "HoleInsideCell";
    case ErrorCode::DegenerateTangency: return "DegenerateTangency";
    case ErrorCode::MultipleCutLoops: return "MultipleCutLoops";
    case ErrorCode::MergeFailure: return "MergeFailure";
    case ErrorCode::AnchorNotFound: return "AnchorNotFound";
    case ErrorCode::NegativeJacobian: return "NegativeJacobian";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::NonFiniteVelocity: return "NonFiniteVelocity";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TouchesBoundary: return "TouchesBoundary";
    case ErrorCode::InsufficientCells: return "InsufficientCells";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::PreimageUnresolvable: return "PreimageUnresolvable";
    case ErrorCode::ZeroInitialMass: return "ZeroInitialMass";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slfv
