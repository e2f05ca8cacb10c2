#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldap {

enum class Errc {
  ZeroRank,
  DimensionMismatch,
  InvalidDimension,
  ZeroGradient,
  BadShape,
  EmptyConditional,
  EigenFailure,
  AlphaOutOfRange,
  TOutOfRange,
  ZeroProjectedGradient,
  EmptySample,
  EpsOutOfValidityWindow,
  AlphaTooSmall,
  EpsExceedsR,
  POutOfRange,
  DegenerateVolume,
  IoError,
  ConfigError,
  UnknownBound,
  MissingParam,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::ZeroRank: return "ZeroRank";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidDimension: return "InvalidDimension";
    case Errc::ZeroGradient: return "ZeroGradient";
    case Errc::BadShape: return "BadShape";
    case Errc::EmptyConditional: return "EmptyConditional";
    case Errc::EigenFailure: return "EigenFailure";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::TOutOfRange: return "TOutOfRange";
    case Errc::ZeroProjectedGradient: return "ZeroProjectedGradient";
    case Errc::EmptySample: return "EmptySample";
    case Errc::EpsOutOfValidityWindow: return "EpsOutOfValidityWindow";
    case Errc::AlphaTooSmall: return "AlphaTooSmall";
    case Errc::EpsExceedsR: return "EpsExceedsR";
    case Errc::POutOfRange: return "POutOfRange";
    case Errc::DegenerateVolume: return "DegenerateVolume";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownBound: return "UnknownBound";
    case Errc::MissingParam: return "MissingParam";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the `Errc` kinds.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace ldap
