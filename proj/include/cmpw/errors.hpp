#pragma once

#include <stdexcept>
#include <string>

namespace cmpw {

enum class Err {
  NonPositiveLength,
  OddOrTinyNodeCount,
  TabulatedLengthMismatch,
  LengthMismatch,
  MTooLarge,
  GridMismatch,
  ZeroDenominator,
  UnnormalizedInput,
  NegativeThreshold,
  RankDeficient,
  SweepDivergence,
  IndefiniteSystem,
  InnerSolverStall,
  MaxIterExceeded,
  SupportExceedsDomain,
  ZeroModeCollapse,
  NewtonDivergence,
  PoleCrossing,
  InfeasibleInput,
  ShiftNotDivisor,
  LevelMissing,
  IncompatibleScale,
  ShapeMismatch,
  EmptyWindow,
  KTooLarge,
  UnknownExperiment,
  ConfigInvalid,
  NonPositiveGap,
  WriteFailed,
};

const char* err_name(Err e);

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg);
};

[[noreturn]] void fail(Err c, const std::string& msg);

inline void require(bool ok, Err c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace cmpw
