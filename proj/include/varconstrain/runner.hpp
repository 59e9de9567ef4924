#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "varconstrain/checkpoint.hpp"
#include "varconstrain/config.hpp"

namespace varconstrain {

inline constexpr const char* kErrorsHeader =
    "iteration,wall_time_s,loss,mu,absolute_error,relative_objective_error,constraint_error";

/// Exit status of run/resume: 0 completed, 2 numeric failure (partial artifacts written).
/// Writes errors.csv, checkpoint.json, config.txt and summary.json under `out`.
int run_experiment(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Continues from out/checkpoint.json. `config`, when given, must be compatible.
int resume_experiment(const std::filesystem::path& out, std::ostream& log,
                      const RunConfig* config = nullptr);

struct CsvRow {
  std::int64_t iteration = 0;
  double wall_time_s = 0, loss = 0, mu = 0, absolute = 0, relative_objective = 0, constraint = 0;
};

std::vector<CsvRow> read_errors_csv(const std::filesystem::path& path);

/// Two-column data files per metric for each run directory; with two runs also
/// comparison.txt holding wall-time ratios (penalty run over augmented Lagrangian run).
/// Returns the written file paths.
std::vector<std::filesystem::path> write_report(const std::vector<std::filesystem::path>& runs,
                                                const std::filesystem::path& out);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite: gradients, quadrature, parameter counts, truth oracles, schedules.
std::vector<CheckResult> verify_invariants();

}  // namespace varconstrain
