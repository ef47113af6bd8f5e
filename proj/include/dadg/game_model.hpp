#pragma once

#include <vector>

#include "dadg/time_grid.hpp"
#include "dadg/types.hpp"

namespace dadg {

// Complete description of one game instance: per-player dynamics, noise
// gains, cost weights, horizon, and observation price. Immutable value data;
// validate() is called by every consumer that assembles derived systems.
struct GameParameters {
  int n = 0;            // per-player state dimension
  Matrix a_a, a_d;      // n x n drift matrices
  Matrix b_tilde_a;     // n x m_a input matrix
  Matrix b_tilde_d;     // n x m_d input matrix
  Matrix c_a, c_d;      // n x n noise gain matrices
  double omega_a_i = 0.0, omega_d_i = 0.0;  // running-cost weights
  double omega_a = 0.0, omega_d = 0.0;      // terminal-cost weights
  double obs_cost = 0.0;                    // price of one observation
  double t_f = 0.0;                         // horizon
  Vector x_a0, x_d0;

  void validate() const;
};

// Asset motion, either generated by x_s' = A_s x_s or given as grid samples
// interpolated linearly. The generator form is required only when the full
// 3n Riccati solve is requested.
struct AssetTrajectory {
  enum class Kind { linear, sampled };

  Kind kind = Kind::linear;
  Matrix a_s;
  Vector x_s0;
  std::vector<double> times;
  std::vector<Vector> values;

  static AssetTrajectory linear(Matrix a_s, Vector x_s0);
  static AssetTrajectory sampled(std::vector<double> times, std::vector<Vector> values);

  void validate(int n, double t_f) const;

  // Point evaluation; the linear variant pays a matrix exponential per call,
  // bulk consumers should use sample_half_grid instead.
  Vector value_at(double t) const;

  // Samples at grid.dt()/2 spacing, 2*intervals + 1 entries. The linear
  // variant is propagated by repeated exact half-steps.
  std::vector<Vector> sample_half_grid(const TimeGrid& grid) const;
};

// Stacked 3n system [x_a; x_d; x_s] with the block-patterned weights
// Q = W(omega_a_i, omega_d_i) and Q_f = W(omega_a, omega_d).
struct AggregateSystem {
  int n = 0;
  Matrix a;        // 3n x 3n block diagonal
  Matrix b_a;      // 3n x m_a
  Matrix b_d;      // 3n x m_d
  Matrix c;        // 3n x 3n, zero asset block
  Matrix q, q_f;   // 3n x 3n symmetric
  bool has_asset_generator = false;  // false when the asset was sampled

  Matrix q11() const { return q.topLeftCorner(2 * n, 2 * n); }
  Matrix q12() const { return q.topRightCorner(2 * n, n); }
  Matrix qf11() const { return q_f.topLeftCorner(2 * n, 2 * n); }
  Matrix qf12() const { return q_f.topRightCorner(2 * n, n); }
};

// The 2n blocks that drive the decomposed Riccati equation.
struct TruncatedBlocks {
  int n = 0;
  Matrix a_hat;    // blockdiag(A_a, A_d)
  Matrix b_hat_a;  // [B~_a; 0]
  Matrix b_hat_d;  // [0; B~_d]

  Matrix input_a() const { return b_hat_a.topRows(n); }     // B~_a
  Matrix input_d() const { return b_hat_d.bottomRows(n); }  // B~_d
};

// 3n x 3n weight matrix with the fixed 3x3 block pattern
//   [ (w1-w2) I   w2 I   -w1 I ]
//   [   w2 I     -w2 I     0   ]
//   [  -w1 I       0      w1 I ]
// so that x' W x = w1 |x_a - x_s|^2 - w2 |x_d - x_a|^2.
Matrix build_weight_matrix(double w1, double w2, int n);

AggregateSystem build_aggregate(const GameParameters& params, const AssetTrajectory& asset);

TruncatedBlocks truncated_blocks(const GameParameters& params);

}  // namespace dadg
