#pragma once

#include <stdexcept>
#include <string>

namespace fracmax {

enum class ErrorCode {
  InvalidGrid,
  EmptyBall,
  MisalignedCube,
  MisalignedLevel,
  InvalidAlpha,
  EmptyRadiusGrid,
  BetaOutOfRange,
  TooSmall,
  ZeroFunction,
  NotInQ0,
  NotWitness,
  OutOfRange,
  ZeroRHS,
  InvalidParamRange,
  Io,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the CLI maps these to exit 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracmax
