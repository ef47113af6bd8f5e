#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "dadg/estimation.hpp"
#include "dadg/game_model.hpp"
#include "dadg/riccati.hpp"
#include "dadg/types.hpp"

namespace dadg {

enum class Player { attacker, defender };

const char* player_name(Player p);

// Ordered observation instants in the open interval (0, t_f).
struct ObservationSchedule {
  Player player = Player::attacker;
  std::vector<double> instants;

  static ObservationSchedule empty(Player p) { return {p, {}}; }
  static ObservationSchedule of(Player p, std::vector<double> instants, double t_f);

  int count() const { return static_cast<int>(instants.size()); }
  void validate(double t_f) const;
};

ObservationSchedule periodic_schedule(Player player, int count, double t_f);

// Estimation-mismatch integral f, the priced total f + O N, and the N + 1
// per-interval contributions.
struct ScheduleCost {
  double f = 0.0;
  double total = 0.0;
  std::vector<double> per_interval;
};

// Per-node matrix samples with linear interpolation; carries the phi paths
// into the optimizer.
struct MatrixPath {
  TimeGrid grid;
  std::vector<Matrix> samples;

  Matrix at(double t) const;
};

MatrixPath phi_path(const RiccatiPath& riccati, Player player);

// Sum over intervals of int Tr[Sigma(t - t_i) phi(t)] dt plus O N, with the
// sentinels t_0 = 0 and t_{N+1} = t_f. The attacker prices (Sigma_1d, phi_a),
// the defender (Sigma_2a, phi_d); the player tag on the schedule selects the
// covariance model.
ScheduleCost tilde_cost(const ObservationSchedule& schedule, const CovariancePath& cov,
                        const MatrixPath& phi, double obs_cost);

// Pre-observation error mass: int_{t_prev}^{t_i} of
// Tr[e^{A(t_i - t)} CC' e^{A'(t_i - t)} phi(t_i)] dt.
double lhs_integral(double t_prev, double t_i, const Matrix& a, const Matrix& c,
                    const Matrix& phi_at_ti, double quad_step);

// Post-observation error mass: int_{t_i}^{t_end} of
// Tr[e^{A(t - t_i)} CC' e^{A'(t - t_i)} phi(t)] dt. Nondecreasing in t_end.
double rhs_integral(double t_i, double t_end, const Matrix& a, const Matrix& c,
                    const MatrixPath& phi);

struct BinarySearchResult {
  ObservationSchedule schedule;
  int iterations = 0;
};

struct CountSearchResult {
  int count = 0;
  ObservationSchedule schedule;
  ScheduleCost cost;
};

struct BruteForceResult {
  ObservationSchedule schedule;
  double f = 0.0;
};

// One player's observation-scheduling problem. Deliberately constructed from
// nothing but the opponent's (A, C), the weighting path phi, and the horizon:
// the asset trajectory cannot influence any result by construction.
class ScheduleOptimizer {
 public:
  ScheduleOptimizer(Player player, Matrix opponent_drift, Matrix opponent_noise, MatrixPath phi);

  static ScheduleOptimizer for_player(Player player, const GameParameters& params,
                                      const RiccatiPath& riccati);

  Player player() const { return player_; }
  double horizon() const { return phi_.grid.t_f; }

  double lhs(double t_prev, double t_i) const;
  double rhs(double t_i, double t_end) const;

  ScheduleCost cost(const ObservationSchedule& schedule, double obs_cost) const;

  // Smallest root of r(t_i, .) = l(t_prev, t_i) by bisection on the
  // nondecreasing map, or nullopt when the remaining mass is insufficient.
  std::optional<double> next_instance(double t_prev, double t_i, double tol) const;

  // Algorithm-1 style bisection on the first instant, chaining the rest via
  // the equal-area condition. Iterations are bounded by ceil(log2(t_f/eps)).
  BinarySearchResult binary_search_schedule(int count, double eps) const;

  // Stationarity defects l(t_{i-1}, t_i) - r(t_i, t_{i+1}); they equal the
  // partial derivatives of f at interior points.
  std::vector<double> residuals(const ObservationSchedule& schedule) const;

  // Scans counts N = 0, 1, ... for the minimizer of f*(N) + O N, pruning with
  // the mass bound N* < f*(0)/O and its running refinements N* <= N + f*(N)/O.
  CountSearchResult optimal_observation_count(double obs_cost, std::optional<int> cap = {},
                                              double eps = 0.0) const;

  // Exhaustive minimization of f over the h-grid, N in {1, 2} only.
  BruteForceResult brute_force_schedule(int count, double grid_step) const;

 private:
  struct MassScan {
    double total = 0.0;
    std::optional<double> root;
  };
  MassScan scan_mass(double t_i, double target, double tol) const;

  Player player_;
  Matrix drift_, noise_;
  MatrixPath phi_;
  double quad_step_;
  double root_tol_;
};

// Schedule CSV round trip: header "player,index,instant", one row per
// observation.
void write_schedules_csv(const std::vector<ObservationSchedule>& schedules, std::ostream& out);
std::vector<ObservationSchedule> read_schedules_csv(std::istream& in, double t_f);

}  // namespace dadg
