#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "dadg/estimation.hpp"
#include "dadg/game_model.hpp"
#include "dadg/riccati.hpp"
#include "dadg/schedule.hpp"
#include "dadg/types.hpp"

namespace dadg {

// Everything a rollout needs, solved once and shared read-only by all trials.
struct GameSystem {
  GameParameters params;
  AssetTrajectory asset;
  AggregateSystem aggregate;
  TruncatedBlocks blocks;
  RiccatiPath riccati;        // K11 + co-state + phi, K_full when the asset is linear
  CovariancePath covariance;
};

GameSystem make_game_system(const GameParameters& params, const AssetTrajectory& asset,
                            const TimeGrid& grid);

// How the players' estimates evolve between observations.
//
// `decoupled` simulates each estimation error as its own process
// de = A e dt + C dw (reset to zero at observations) and recovers the
// estimate as truth minus error. This is the model behind the closed-form
// cost decomposition: the error covariance is exactly the tabulated
// Sigma(t - t~), and the Monte Carlo mean reproduces the analytic total.
//
// `coupled` propagates the estimator differential equations literally. The
// opponent's applied control then differs from the estimator's model of it,
// which feeds each player's error back into the other's; the realized error
// covariance deviates from Sigma and the decomposition no longer holds. Kept
// for studying exactly that gap.
enum class EstimatorModel { decoupled, coupled };

struct SimulationConfig {
  std::uint64_t master_seed = 0;
  int trials = 0;
  double dt = 0.0;
  ObservationSchedule schedule_a{Player::attacker, {}};
  ObservationSchedule schedule_d{Player::defender, {}};
  bool record_traces = false;
  int threads = 0;  // 0 = all available
  EstimatorModel estimator = EstimatorModel::decoupled;

  // Step count; dt must divide t_f to within 1e-12.
  int steps_for(double t_f) const;
};

// Feedback pair of Theorem-style form:
//   u_a = -B^_a'(K11 [x_a; x^_1d] + s),  u_d = B^_d'(K11 [x^_2a; x_d] + s).
std::pair<Vector, Vector> nash_controls(const Vector& x_a, const Vector& x_d,
                                        const EstimatorState& estimates,
                                        const RiccatiPath& riccati,
                                        const TruncatedBlocks& blocks, double t);

// One Euler-Maruyama rollout. Per-step rows, observation markers, and the
// realized cost including terminal and observation terms.
struct SimulationTrace {
  double dt = 0.0;
  int steps = 0;
  std::vector<double> t;
  std::vector<Vector> x_a, x_d, x_s;
  std::vector<Vector> x_hat_1d, x_hat_2a;
  std::vector<Vector> u_a, u_d;
  std::vector<int> obs_steps_a, obs_steps_d;  // snapped step indices
  double realized_cost = 0.0;
  double mismatch_a = 0.0;  // int |B~_a' K11ur (x_d - x^_1d)|^2 dt
  double mismatch_d = 0.0;  // int |B~_d' K11ur' (x_a - x^_2a)|^2 dt
  double max_snap_error = 0.0;
};

SimulationTrace simulate_trial(const GameSystem& system, const SimulationConfig& config,
                               int trial_index);

void write_trace_csv(const SimulationTrace& trace, std::ostream& out);

struct TrialStats {
  double cost = 0.0;
  double mismatch_a = 0.0;
  double mismatch_d = 0.0;
};

// Serial reference loop and the OpenMP kernel; identical trial arithmetic,
// results written by trial index, so both produce bitwise-equal output.
std::vector<TrialStats> run_trials_serial(const GameSystem& system,
                                          const SimulationConfig& config);
std::vector<TrialStats> run_trials_parallel(const GameSystem& system,
                                            const SimulationConfig& config);

struct MonteCarloResult {
  int trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double mismatch_a_mean = 0.0;
  double mismatch_d_mean = 0.0;
  double obs_term = 0.0;                 // O (N_a - N_d)
  std::optional<double> trace_term;      // int Tr(K CC') dt, needs K_full
  std::optional<double> initial_term;    // x0' K(0) x0, needs K_full
  double constants_estimate = 0.0;       // mean - (mismatch_a - mismatch_d + obs)
};

// Sample mean and standard error of the realized cost, reduced in ascending
// trial order. threads = 1 uses the serial reference loop.
MonteCarloResult monte_carlo_cost(const GameSystem& system, const SimulationConfig& config);

// The six-term closed-form decomposition of the expected cost under the Nash
// controls. Constant terms require K_full; with a sampled asset only the
// schedule-dependent part is available.
struct AnalyticCost {
  double f_a = 0.0;
  double f_d = 0.0;
  double obs_term = 0.0;
  std::optional<double> trace_term;
  std::optional<double> initial_term;
  double schedule_terms = 0.0;          // f_a - f_d + obs_term
  std::optional<double> total;
};

AnalyticCost analytic_total_cost(const GameSystem& system, const ObservationSchedule& schedule_a,
                                 const ObservationSchedule& schedule_d, const CovariancePath& cov,
                                 const MatrixPath& phi_a, const MatrixPath& phi_d);

}  // namespace dadg
