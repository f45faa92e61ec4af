#pragma once

#include <stdexcept>
#include <string>

namespace gcf {

enum class ErrorCode {
  InvalidDimension,
  InvalidExponent,
  DegenerateGeometry,
  NoConvergence,
  LostConvexity,
  ShootingFailed,
  StabilityFailure,
  EnvelopeUndefined,
  DomainMismatch,
  InsufficientSamples,
  AsymmetricDomain,
  CaseUndefined,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidDimension:    return "InvalidDimension";
    case ErrorCode::InvalidExponent:     return "InvalidExponent";
    case ErrorCode::DegenerateGeometry:  return "DegenerateGeometry";
    case ErrorCode::NoConvergence:       return "NoConvergence";
    case ErrorCode::LostConvexity:       return "LostConvexity";
    case ErrorCode::ShootingFailed:      return "ShootingFailed";
    case ErrorCode::StabilityFailure:    return "StabilityFailure";
    case ErrorCode::EnvelopeUndefined:   return "EnvelopeUndefined";
    case ErrorCode::DomainMismatch:      return "DomainMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::AsymmetricDomain:    return "AsymmetricDomain";
    case ErrorCode::CaseUndefined:       return "CaseUndefined";
    case ErrorCode::ConfigError:         return "ConfigError";
    case ErrorCode::IoError:             return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace gcf
