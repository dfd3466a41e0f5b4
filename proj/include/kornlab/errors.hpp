#pragma once

#include <stdexcept>
#include <string>

namespace kornlab {

/// Process exit codes shared by every front end.
enum class ExitCode : int {
  Ok = 0,
  InvalidInput = 2,
  Degenerate = 3,
  SolverFailure = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed configuration, mesh, field file or parameters.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ExitCode::InvalidInput, what) {}
};

/// The estimate is vacuous: dist(∇u, SO(2)) vanishes identically.
class ZeroDistance : public Error {
 public:
  explicit ZeroDistance(const std::string& what) : Error(ExitCode::Degenerate, what) {}
};

/// ‖D(u)‖ = 0, i.e. the input is an infinitesimal rigid motion.
class InfiniteQuotient : public Error {
 public:
  explicit InfiniteQuotient(const std::string& what) : Error(ExitCode::Degenerate, what) {}
};

/// A matrix field that was required to be a gradient has row-curls above tolerance.
class CurlResidualTooLarge : public Error {
 public:
  CurlResidualTooLarge(double residual, double tolerance)
      : Error(ExitCode::SolverFailure,
              "row-curl residual " + std::to_string(residual) + " exceeds tolerance " +
                  std::to_string(tolerance)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ExitCode::SolverFailure, what) {}
};

}  // namespace kornlab
