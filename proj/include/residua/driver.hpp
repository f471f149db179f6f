#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "residua/ast.hpp"

namespace residua {

/// Exit codes: 0 success, 1 verification failure, 2 input errors.
enum ExitCode { kExitOk = 0, kExitVerifyFailed = 1, kExitInputError = 2 };

struct RunConfig {
  std::vector<std::string> sources;   // .f files or directories
  std::string constraints_path;       // optional
  std::string policy = "all";         // all | none | keep:<file>
  std::string out_dir = "out";
  std::string emit = "report";        // report | program | both
  std::string report_format = "both"; // json | html | both
  int variant_cap = 64;
  int trials = 200;
  std::uint64_t seed = 1;
  long long fuel = 1'000'000;
  bool unchecked = false;
  /// Test hook: corrupt the residual statement with this ProvId before
  /// verification, to exercise the diff-test gate.
  std::optional<int> debug_mutate;
};

/// Runs parse -> resolve -> specialize -> (diff test) -> emit.
/// Diagnostics go to `err` as file:line:col: kind: message.
int run_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace residua
