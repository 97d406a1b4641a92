#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ckd {

enum class Errc {
  MalformedHeader,
  EmptyData,
  DomainViolation,
  LabelMissing,
  TypeMismatch,
  BadSpec,
  AllMissingForClass,
  PlanGap,
  ResidualMissing,
  DimensionMismatch,
  TooFewSamples,
  NotPositiveDefinite,
  DegenerateData,
  NonFiniteLoss,
  KTooLarge,
  BadK,
  LengthMismatch,
  EmptyMatrix,
  Config,
  Io,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::EmptyData: return "EmptyData";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::LabelMissing: return "LabelMissing";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::BadSpec: return "BadSpec";
    case Errc::AllMissingForClass: return "AllMissingForClass";
    case Errc::PlanGap: return "PlanGap";
    case Errc::ResidualMissing: return "ResidualMissing";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::BadK: return "BadK";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), message_(message) {}

  Errc code() const noexcept { return code_; }

  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace ckd
