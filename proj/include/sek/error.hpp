#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sek {

enum class Errc {
  DegenerateMetric,
  WrongSignature,
  NonTimelikeFutureAxis,
  DimensionOutOfRange,
  RankOutOfRange,
  ShapeMismatch,
  SlotOutOfRange,
  FrameMismatch,
  RankMismatch,
  ZeroTensor,
  RankZero,
  ArityMismatch,
  InvalidStructure,
  StructureMismatch,
  UnsupportedNBlock,
  FoldTooLarge,
  ResourceLimit,
  NotAntisymmetric,
  NotSymmetric,
  NotDominant,
  NotDiagonalizable,
  WrongDimension,
  BadParams,
  SingularJacobian,
  DegenerateCandidate,
  UnknownExample,
  NegativeInitial,
  CutOutOfRange,
  InvalidBundle,
  ConstraintViolation,
  BadRange,
  MalformedInput,
};

inline constexpr std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::DegenerateMetric: return "DegenerateMetric";
    case Errc::WrongSignature: return "WrongSignature";
    case Errc::NonTimelikeFutureAxis: return "NonTimelikeFutureAxis";
    case Errc::DimensionOutOfRange: return "DimensionOutOfRange";
    case Errc::RankOutOfRange: return "RankOutOfRange";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SlotOutOfRange: return "SlotOutOfRange";
    case Errc::FrameMismatch: return "FrameMismatch";
    case Errc::RankMismatch: return "RankMismatch";
    case Errc::ZeroTensor: return "ZeroTensor";
    case Errc::RankZero: return "RankZero";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::InvalidStructure: return "InvalidStructure";
    case Errc::StructureMismatch: return "StructureMismatch";
    case Errc::UnsupportedNBlock: return "UnsupportedNBlock";
    case Errc::FoldTooLarge: return "FoldTooLarge";
    case Errc::ResourceLimit: return "ResourceLimit";
    case Errc::NotAntisymmetric: return "NotAntisymmetric";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotDominant: return "NotDominant";
    case Errc::NotDiagonalizable: return "NotDiagonalizable";
    case Errc::WrongDimension: return "WrongDimension";
    case Errc::BadParams: return "BadParams";
    case Errc::SingularJacobian: return "SingularJacobian";
    case Errc::DegenerateCandidate: return "DegenerateCandidate";
    case Errc::UnknownExample: return "UnknownExample";
    case Errc::NegativeInitial: return "NegativeInitial";
    case Errc::CutOutOfRange: return "CutOutOfRange";
    case Errc::InvalidBundle: return "InvalidBundle";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::BadRange: return "BadRange";
    case Errc::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Cases the library refuses by design rather than because the input is bad.
inline constexpr bool is_unsupported_case(Errc e) {
  return e == Errc::UnsupportedNBlock || e == Errc::FoldTooLarge ||
         e == Errc::ResourceLimit || e == Errc::NotDiagonalizable ||
         e == Errc::WrongDimension;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sek
