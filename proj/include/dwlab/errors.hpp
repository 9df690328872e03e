#pragma once

#include <stdexcept>
#include <string>

namespace dwlab {

/// Process exit codes used by the CLI; library errors carry one of these
/// so the driver can map failures without string matching.
enum class ExitCode : int {
  Ok = 0,
  AcceptanceFailure = 1,
  ConfigError = 2,
  HierarchyError = 3,
  SolverError = 4,
  BudgetExceeded = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, std::string stage, const std::string& message,
        std::string context = {})
      : std::runtime_error(message),
        code_(code),
        stage_(std::move(stage)),
        context_(std::move(context)) {}

  ExitCode code() const { return code_; }
  const std::string& stage() const { return stage_; }
  const std::string& context() const { return context_; }

 private:
  ExitCode code_;
  std::string stage_;
  std::string context_;
};

struct ConfigError : Error {
  ConfigError(const std::string& stage, const std::string& msg,
              const std::string& ctx = {})
      : Error(ExitCode::ConfigError, stage, msg, ctx) {}
};

struct HierarchyError : Error {
  HierarchyError(const std::string& stage, const std::string& msg,
                 const std::string& ctx = {})
      : Error(ExitCode::HierarchyError, stage, msg, ctx) {}
};

struct SolverError : Error {
  SolverError(const std::string& stage, const std::string& msg,
              const std::string& ctx = {})
      : Error(ExitCode::SolverError, stage, msg, ctx) {}
};

struct BudgetError : Error {
  BudgetError(const std::string& stage, const std::string& msg,
              const std::string& ctx = {})
      : Error(ExitCode::BudgetExceeded, stage, msg, ctx) {}
};

}  // namespace dwlab
