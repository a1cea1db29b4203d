#pragma once

#include <stdexcept>
#include <string>

namespace sqo {

// Exit codes used by the CLI. Each failure class maps to a distinct code so
// batch drivers can tell infeasible configurations from numerical failures.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasibleDepths = 2,
  kExitBasisInadequate = 3,
  kExitIntegrationFailure = 4,
};

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return kExitConfig; }
};

struct ConfigError : Error {
  using Error::Error;
  int exit_code() const override { return kExitConfig; }
};

// A trap depth went negative (nonphysical) while building a schedule.
struct DepthError : Error {
  using Error::Error;
  int exit_code() const override { return kExitInfeasibleDepths; }
};

// Requested state or operator does not fit in the configured basis.
struct BasisError : Error {
  using Error::Error;
  int exit_code() const override { return kExitBasisInadequate; }
};

struct IntegrationError : Error {
  using Error::Error;
  int exit_code() const override { return kExitIntegrationFailure; }
};

// Series or eigenbasis failed its convergence check.
struct ConvergenceError : Error {
  using Error::Error;
};

}  // namespace sqo
