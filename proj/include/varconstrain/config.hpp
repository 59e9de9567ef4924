#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varconstrain/nets.hpp"
#include "varconstrain/problems.hpp"
#include "varconstrain/schedule.hpp"
#include "varconstrain/solver.hpp"

namespace varconstrain {

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Everything needed to reproduce one run.
struct RunConfig {
  std::string problem = "geodesic";
  Method method = Method::kPenalty;
  std::int64_t E = 5000;
  std::int64_t P = 250;
  /// Optional explicit Q; must equal E / P.
  std::optional<std::int64_t> q;
  PenaltySchedule penalty;
  double L0 = 1e-3;
  double D0 = 1e-1;
  std::optional<double> L1;
  std::optional<double> D1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  ProblemOptions quad;
  bool mc_resample = false;
  NetworkSpec solution;
  NetworkSpec multiplier;
  bool unscaled_update = false;
  std::uint64_t seed = 0;
  std::int64_t log_every = 100;
  /// Subproblems between checkpoints; the final state is always written.
  std::int64_t checkpoint_every = 50;

  std::int64_t Q() const { return E / P; }
};

/// "paper" (full-scale hyperparameters) or "desk" (same schedules, fewer steps and nodes).
RunConfig preset_config(const std::string& problem, Method method, const std::string& preset);

/// Flat `key = value` lines; '#' starts a comment.
Settings parse_settings(std::string_view text);
Settings read_settings_file(const std::string& path);

void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
void apply_settings(RunConfig& config, const Settings& settings);

/// Every key, in a form apply_settings reads back to the same config.
Settings to_settings(const RunConfig& config);
std::string format_settings(const Settings& settings);

SolverConfig solver_config(const RunConfig& config);

/// Full consistency check, including the problem/network pairing.
void validate(const RunConfig& config);

}  // namespace varconstrain
