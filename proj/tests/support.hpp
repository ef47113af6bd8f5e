#pragma once

#include <random>

#include "dadg/game_model.hpp"

// Shared fixtures for the test binaries. The planar zero-drift instance used
// throughout ("case study"): two players with simple-motion dynamics on the
// plane, scalar input gains b = 0.5, noise gain 2 I, terminal-only weights
// omega_a = 2, omega_d = 3.
namespace dadg::testing {

inline GameParameters case_study_params(double omega_a = 2.0, double t_f = 10.0,
                                        double obs_cost = 20.0) {
  GameParameters p;
  p.n = 2;
  p.a_a = Matrix::Zero(2, 2);
  p.a_d = Matrix::Zero(2, 2);
  p.b_tilde_a = 0.5 * Matrix::Identity(2, 2);
  p.b_tilde_d = 0.5 * Matrix::Identity(2, 2);
  p.c_a = 2.0 * Matrix::Identity(2, 2);
  p.c_d = 2.0 * Matrix::Identity(2, 2);
  p.omega_a_i = 0.0;
  p.omega_d_i = 0.0;
  p.omega_a = omega_a;
  p.omega_d = 3.0;
  p.obs_cost = obs_cost;
  p.t_f = t_f;
  p.x_a0 = Vector::Zero(2);
  p.x_a0 << -1.0, -1.0;
  p.x_d0 = Vector::Zero(2);
  p.x_d0 << 0.5, -0.5;
  return p;
}

inline AssetTrajectory case_study_asset() {
  Matrix a_s(2, 2);
  a_s << 0.0, 0.3, -0.3, 0.0;
  Vector x_s0(2);
  x_s0 << 1.0, 0.5;
  return AssetTrajectory::linear(a_s, x_s0);
}

inline Matrix random_matrix(std::mt19937& gen, int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(gen);
  return m;
}

inline Vector random_vector(std::mt19937& gen, int size, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = dist(gen);
  return v;
}

// Random drift with eigenvalues shifted left of -margin.
inline Matrix random_stable_matrix(std::mt19937& gen, int n, double scale, double margin) {
  Matrix m = random_matrix(gen, n, n, scale);
  const double spread = m.cwiseAbs().rowwise().sum().maxCoeff();
  return m - (spread + margin) * Matrix::Identity(n, n);
}

}  // namespace dadg::testing
