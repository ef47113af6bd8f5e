#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dadg/game_model.hpp"
#include "dadg/simulator.hpp"
#include "dadg/types.hpp"

namespace dadg {

struct OptimizerSection {
  double eps = 1e-6;
  std::optional<int> count;  // fixed N; empty = pick N by total cost
  int count_cap = 64;
  int count_range_lo = 1;
  int count_range_hi = 10;
  std::vector<double> obs_cost_sweep;
  std::vector<double> omega_a_sweep;
};

struct SimulationSection {
  std::uint64_t seed = 0;
  int trials = 0;
  double dt = 0.0;
  bool record_traces = false;
  int trace_count = 3;
  int threads = 0;
  EstimatorModel estimator = EstimatorModel::decoupled;
  std::string schedule_source = "none";  // none | optimal | periodic | file
  std::string schedule_file;
};

struct OutputSection {
  std::string directory = ".";
};

// Parsed and validated run configuration. Unknown keys anywhere in the JSON
// document are rejected with the offending pointer path.
struct RunConfig {
  GameParameters game;
  AssetTrajectory asset;
  int grid_intervals = 2000;
  OptimizerSection optimizer;
  SimulationSection simulation;
  OutputSection output;
  nlohmann::json raw;  // canonical echo for reproducible summaries
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace dadg
