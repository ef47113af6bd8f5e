#pragma once

#include <iosfwd>
#include <vector>

#include "dadg/game_model.hpp"
#include "dadg/time_grid.hpp"
#include "dadg/types.hpp"

namespace dadg {

// Any Riccati/covariance entry above this magnitude is treated as a finite
// escape and aborts the backward integration.
inline constexpr double kEscapeThreshold = 1e12;

// Time-gridded backward solution: K11 always present, the co-state s, the
// full 3n matrix K, and the weighting paths phi_a/phi_d filled on demand.
// Stored samples are symmetrized; between nodes everything is interpolated
// linearly. Immutable once the solvers return, safe to share across threads.
struct RiccatiPath {
  TimeGrid grid;
  int n = 0;  // per-player dimension; K11 samples are 2n x 2n

  std::vector<Matrix> k11;
  // Half-resolution samples (2M + 1 entries) from the same integration; the
  // co-state solver and estimator stepping read their RK4 midpoints here.
  std::vector<Matrix> k11_half;
  std::vector<Vector> s;
  std::vector<Matrix> k_full;
  std::vector<Matrix> phi_a, phi_d;

  bool has_s() const { return !s.empty(); }
  bool has_full() const { return !k_full.empty(); }
  bool has_phi() const { return !phi_a.empty(); }

  Matrix k11_at(double t) const;
  Vector s_at(double t) const;
  Matrix k_full_at(double t) const;
  Matrix phi_a_at(double t) const;
  Matrix phi_d_at(double t) const;

  // Upper-right n x n block of a stored K11 sample.
  Matrix k11_upper_right(int node) const { return k11[node].block(0, n, n, n); }
};

// Backward RK4 integration of
//   K11' = -K11 A^ - A^' K11 - Q11 - K11 (B^_d B^_d' - B^_a B^_a') K11
// from K11(t_f) = Qf11. Every accepted step is symmetrized. Throws
// NumericalError on finite escape.
RiccatiPath solve_k11(const TruncatedBlocks& blocks, const Matrix& q11, const Matrix& qf11,
                      const TimeGrid& grid);

// Backward RK4 integration of the co-state
//   s' = [-A^' - K11 (B^_d B^_d' - B^_a B^_a')] s - Q12 x_s
// from s(t_f) = Qf12 x_s(t_f), stored into `path`. K11 stage values are
// regenerated alongside s so the pair keeps full fourth-order accuracy.
void solve_s(RiccatiPath& path, const TruncatedBlocks& blocks, const Matrix& q12,
             const Matrix& qf12, const AssetTrajectory& asset);

// Backward RK4 integration of the full 3n Riccati equation
//   K' = -K A - A' K - Q - K (B_d B_d' - B_a B_a') K
// from K(t_f) = Q_f. Requires the asset generator (linear asset).
RiccatiPath solve_full_k(const AggregateSystem& aggregate, const TimeGrid& grid);

// Bounded closed-form K11 for the planar zero-drift game with scalar input
// gains and zero running cost:
//   K11(t) = k(t) [[kappa1(t), -1], [-1, kappa2(t)]] (x) I_2.
// Throws NumericalError if the scalar denominator vanishes inside [0, t_f].
Matrix closed_form_k11(double omega_a, double omega_d, double b_a, double b_d, double t_f,
                       double t);

// Fills phi_a = K11ur' B~_a B~_a' K11ur and phi_d = K11ur B~_d B~_d' K11ur'
// at every node of an already-solved path.
void weighting_paths(RiccatiPath& path, const TruncatedBlocks& blocks);

// CSV export: one row per node with t, the row-major K11 entries, the
// co-state entries when present, and tr(phi_a)/tr(phi_d) when present.
void write_riccati_csv(const RiccatiPath& path, std::ostream& out);

}  // namespace dadg
