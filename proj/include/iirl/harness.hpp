#pragma once

#include <string>
#include <vector>

#include "iirl/config.hpp"

namespace iirl {

/// Executes the configured pipeline for every seed (per-seed CSV files)
/// and writes the aggregate CSV. Returns the process exit status:
/// 0 success, 1 runtime failure. Configuration failures throw ConfigError
/// before this point (the CLI maps those to exit 2).
int run_harness(const RunConfig& config);

/// Applies IRL_HARNESS_THREADS to the OpenMP runtime when set.
void apply_thread_cap_from_env();

}  // namespace iirl
