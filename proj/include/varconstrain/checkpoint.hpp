#pragma once

#include <string>

#include "varconstrain/config.hpp"
#include "varconstrain/solver.hpp"

namespace varconstrain {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  RunState state;
};

/// Single JSON file; written to a temporary name and renamed into place.
void save_checkpoint(const std::string& path, const RunConfig& config, const RunState& state);

/// Throws UsageError on a version, shape or spec mismatch.
Checkpoint load_checkpoint(const std::string& path);

/// Refuses (UsageError) when `config` would change what the checkpoint trained.
void check_compatible(const Checkpoint& checkpoint, const RunConfig& config);

}  // namespace varconstrain
