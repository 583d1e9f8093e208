#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stem/report.hpp"

namespace stem::cli {

/// Exit codes: 0 success, 1 usage or validation error, 2 I/O or transport error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one subcommand; `args` excludes the program name.
int execute(const std::vector<std::string>& args);
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Per-benchmark D, regression, residual diagnostics and difficulty split,
/// plus weights and the weighted reference ranking over `weighted`
/// (empty = every benchmark with a full family row).
Json stats_report(const ScoreTable& table, const ModelFamily& family,
                  const std::vector<std::string>& weighted, double log_base = kNaturalLog);

}  // namespace stem::cli
