#include "handover/errors.hpp"

namespace handover {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IKFailed: return "IKFailed";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::InsufficientFrames: return "InsufficientFrames";
    case ErrorKind::MissingKeypoint: return "MissingKeypoint";
    case ErrorKind::InvalidLimits: return "InvalidLimits";
    case ErrorKind::InfeasibleSafeControl: return "InfeasibleSafeControl";
    case ErrorKind::IllegalTransition: return "IllegalTransition";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ScenarioNotFound: return "ScenarioNotFound";
    case ErrorKind::IncompleteLog: return "IncompleteLog";
    case ErrorKind::UnknownModel: return "UnknownModel";
  }
  return "Unknown";
}

}  // namespace handover
