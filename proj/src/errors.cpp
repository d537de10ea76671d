#include "cmpw/errors.hpp"

namespace cmpw {

const char* err_name(Err e) {
  switch (e) {
    case Err::NonPositiveLength: return "NonPositiveLength";
    case Err::OddOrTinyNodeCount: return "OddOrTinyNodeCount";
    case Err::TabulatedLengthMismatch: return "TabulatedLengthMismatch";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::MTooLarge: return "MTooLarge";
    case Err::GridMismatch: return "GridMismatch";
    case Err::ZeroDenominator: return "ZeroDenominator";
    case Err::UnnormalizedInput: return "UnnormalizedInput";
    case Err::NegativeThreshold: return "NegativeThreshold";
    case Err::RankDeficient: return "RankDeficient";
    case Err::SweepDivergence: return "SweepDivergence";
    case Err::IndefiniteSystem: return "IndefiniteSystem";
    case Err::InnerSolverStall: return "InnerSolverStall";
    case Err::MaxIterExceeded: return "MaxIterExceeded";
    case Err::SupportExceedsDomain: return "SupportExceedsDomain";
    case Err::ZeroModeCollapse: return "ZeroModeCollapse";
    case Err::NewtonDivergence: return "NewtonDivergence";
    case Err::PoleCrossing: return "PoleCrossing";
    case Err::InfeasibleInput: return "InfeasibleInput";
    case Err::ShiftNotDivisor: return "ShiftNotDivisor";
    case Err::LevelMissing: return "LevelMissing";
    case Err::IncompatibleScale: return "IncompatibleScale";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::EmptyWindow: return "EmptyWindow";
    case Err::KTooLarge: return "KTooLarge";
    case Err::UnknownExperiment: return "UnknownExperiment";
    case Err::ConfigInvalid: return "ConfigInvalid";
    case Err::NonPositiveGap: return "NonPositiveGap";
    case Err::WriteFailed: return "WriteFailed";
  }
  return "Unknown";
}

Error::Error(Err c, const std::string& msg)
    : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}

void fail(Err c, const std::string& msg) { throw Error(c, msg); }

}  // namespace cmpw
