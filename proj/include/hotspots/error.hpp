#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hotspots {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  Ok = 0,
  InputError = 2,
  PreconditionError = 3,
  Exhaustion = 4,
};

/// Base of every error raised by the library. Carries the exit code the
/// CLI reports when the error escapes a subcommand.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed or unreadable input data (files, coordinates, config values).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::InputError, what) {}
};

/// An operation was called outside its contract.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ExitCode::PreconditionError, what) {}
};

class InvalidCoordinateError : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientTargetsError : public PreconditionError {
 public:
  InsufficientTargetsError(std::size_t have, std::size_t need)
      : PreconditionError("insufficient targets: have " + std::to_string(have) + ", need " +
                          std::to_string(need)) {}
};

class NoElbowError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InconsistentInputError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class UndefinedRatioError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InsufficientRoadCellsError : public PreconditionError {
 public:
  InsufficientRoadCellsError(std::size_t have, std::size_t need)
      : PreconditionError("insufficient road cells: have " + std::to_string(have) + ", need " +
                          std::to_string(need)) {}
};

class SingularDistanceError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Simulation could not place all requested hotspots.
class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error(ExitCode::Exhaustion, what) {}
};

class ExhaustionError : public SimulationError {
 public:
  ExhaustionError(std::size_t picked, std::size_t requested)
      : SimulationError("candidate cells exhausted after " + std::to_string(picked) + " of " +
                        std::to_string(requested) + " picks (shortfall " +
                        std::to_string(requested - picked) + ")"),
        picked_(picked),
        requested_(requested) {}
  std::size_t shortfall() const noexcept { return requested_ - picked_; }

 private:
  std::size_t picked_;
  std::size_t requested_;
};

class ZeroAttractionError : public SimulationError {
 public:
  ZeroAttractionError(std::size_t picked, std::size_t requested)
      : SimulationError("total attraction is zero after " + std::to_string(picked) + " of " +
                        std::to_string(requested) + " picks") {}
};

}  // namespace hotspots
