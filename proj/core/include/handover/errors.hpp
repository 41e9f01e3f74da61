#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace handover {

/// Error categories surfaced by the library. The CLI prints the category
/// name as a greppable prefix, so names are part of the external interface.
enum class ErrorKind {
  DimensionMismatch,
  InvalidModel,
  NoConvergence,
  IKFailed,
  ParseError,
  EmptyTrajectory,
  InsufficientFrames,
  MissingKeypoint,
  InvalidLimits,
  InfeasibleSafeControl,
  IllegalTransition,
  ConfigError,
  ScenarioNotFound,
  IncompleteLog,
  UnknownModel,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by iterative solvers; carries the residual of the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(ErrorKind kind, const std::string& what, double residual)
      : Error(kind, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace handover
