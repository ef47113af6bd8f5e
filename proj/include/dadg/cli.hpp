#pragma once

#include <filesystem>

#include "dadg/config.hpp"
#include "dadg/simulator.hpp"

namespace dadg::cli {

// Solve the configured game end to end (Riccati, co-state, phi, covariance,
// full K when the asset has a generator).
GameSystem build_system(const RunConfig& config);

// Subcommand bodies. Each writes its files under out_dir and throws
// ValidationError / NumericalError on failure; the executable maps those to
// exit codes 2 and 3.
void run_riccati(const RunConfig& config, const std::filesystem::path& out_dir);
void run_optimize(const RunConfig& config, const std::filesystem::path& out_dir);
void run_simulate(const RunConfig& config, const std::filesystem::path& out_dir);
void run_compare(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace dadg::cli
