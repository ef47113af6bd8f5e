#pragma once

#include <utility>
#include <vector>

#include "dadg/game_model.hpp"
#include "dadg/riccati.hpp"
#include "dadg/time_grid.hpp"
#include "dadg/types.hpp"

namespace dadg {

// Exact one-step discretization of the Lyapunov integral: returns
// E = e^{A h} and S = int_0^h e^{A s} C C' e^{A' s} ds via the block
// exponential of [[-A, CC'], [0, A']] h, so that
// Sigma(t + h) = E Sigma(t) E' + S.
struct LyapunovStep {
  Matrix transition;
  Matrix increment;
};
LyapunovStep lyapunov_discretize(const Matrix& a, const Matrix& noise_gain, double step);

// int_0^tau e^{A s} C C' e^{A' s} ds by composite Simpson with `panels`
// subdivisions (rounded up to an even count). tau must be nonnegative.
Matrix error_covariance(const Matrix& a, const Matrix& noise_gain, double tau, int panels);

// Estimation-error covariances as functions of the elapsed time since the
// last observation, tabulated on a uniform grid over [0, t_f]. sigma_1d is
// the attacker's error about the defender (driven by A_d, C_d), sigma_2a the
// defender's error about the attacker (A_a, C_a). Node values come from the
// exact step recurrence, queries interpolate linearly.
struct CovariancePath {
  TimeGrid grid;
  Matrix a_d, c_d;
  Matrix a_a, c_a;
  std::vector<Matrix> sigma_1d;
  std::vector<Matrix> sigma_2a;

  Matrix sigma_1d_at(double tau) const;
  Matrix sigma_2a_at(double tau) const;
};

CovariancePath build_covariance_path(const GameParameters& params, const TimeGrid& grid);

// Each player's running estimate of the opponent plus the times of their most
// recent observations. Owned by a single simulation trial.
struct EstimatorState {
  Vector x_hat_1d;  // attacker's estimate of the defender
  Vector x_hat_2a;  // defender's estimate of the attacker
  double last_obs_a = 0.0;
  double last_obs_d = 0.0;
};

// One RK4 step of the attacker's estimate dynamics
//   v' = A_d v + B~_d B^_d' (K11 [x_a; v] + s)
// with x_a frozen over the step. K11 and s are interpolated from the path.
Vector propagate_attacker_estimate(const EstimatorState& state, const Vector& x_a,
                                   const RiccatiPath& riccati, const TruncatedBlocks& blocks,
                                   double t, double dt);

// Defender side: v' = A_a v - B~_a B^_a' (K11 [v; x_d] + s).
Vector propagate_defender_estimate(const EstimatorState& state, const Vector& x_d,
                                   const RiccatiPath& riccati, const TruncatedBlocks& blocks,
                                   double t, double dt);

namespace detail {

// RK4 cores shared with the simulator kernel; k/s arguments hold K11 and the
// co-state at t, t + dt/2, t + dt.
Vector attacker_estimate_rk4(const Vector& x_hat, const Vector& x_a, const Matrix& a_d,
                             const Matrix& gain, const Matrix& k0, const Matrix& k_mid,
                             const Matrix& k1, const Vector& s0, const Vector& s_mid,
                             const Vector& s1, double dt);
Vector defender_estimate_rk4(const Vector& x_hat, const Vector& x_d, const Matrix& a_a,
                             const Matrix& gain, const Matrix& k0, const Matrix& k_mid,
                             const Matrix& k1, const Vector& s0, const Vector& s_mid,
                             const Vector& s1, double dt);

}  // namespace detail

}  // namespace dadg
