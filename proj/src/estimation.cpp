#include "dadg/estimation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace dadg {

namespace {

Matrix interpolate(const std::vector<Matrix>& samples, const TimeGrid& grid, double tau) {
  const auto loc = grid.locate(tau);
  if (loc.weight == 0.0) return samples[loc.lower];
  return (1.0 - loc.weight) * samples[loc.lower] + loc.weight * samples[loc.lower + 1];
}

void check_elapsed(double tau, double t_f) {
  if (tau < 0.0) throw ValidationError("covariance: elapsed time must be nonnegative");
  if (tau > t_f) throw ValidationError("covariance: elapsed time exceeds the horizon");
}

}  // namespace

LyapunovStep lyapunov_discretize(const Matrix& a, const Matrix& noise_gain, double step) {
  const int n = static_cast<int>(a.rows());
  const Matrix qq = noise_gain * noise_gain.transpose();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -a;
  block.topRightCorner(n, n) = qq;
  block.bottomRightCorner(n, n) = a.transpose();
  const Matrix e = (block * step).exp();
  LyapunovStep out;
  out.transition = e.bottomRightCorner(n, n).transpose();            // e^{A h}
  out.increment = symmetrized(out.transition * e.topRightCorner(n, n));
  return out;
}

Matrix error_covariance(const Matrix& a, const Matrix& noise_gain, double tau, int panels) {
  if (tau < 0.0) throw ValidationError("error_covariance: tau must be nonnegative");
  const int n = static_cast<int>(a.rows());
  if (tau == 0.0) return Matrix::Zero(n, n);
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;

  const double h = tau / panels;
  const Matrix step = (a * h).exp();
  Matrix w = noise_gain;  // e^{A j h} C
  Matrix acc = w * w.transpose();
  for (int j = 1; j < panels; ++j) {
    w = step * w;
    acc += ((j % 2) ? 4.0 : 2.0) * (w * w.transpose());
  }
  w = step * w;
  acc += w * w.transpose();
  return symmetrized((h / 3.0) * acc);
}

Matrix CovariancePath::sigma_1d_at(double tau) const {
  check_elapsed(tau, grid.t_f);
  return interpolate(sigma_1d, grid, tau);
}

Matrix CovariancePath::sigma_2a_at(double tau) const {
  check_elapsed(tau, grid.t_f);
  return interpolate(sigma_2a, grid, tau);
}

CovariancePath build_covariance_path(const GameParameters& params, const TimeGrid& grid) {
  params.validate();
  CovariancePath path;
  path.grid = grid;
  path.a_d = params.a_d;
  path.c_d = params.c_d;
  path.a_a = params.a_a;
  path.c_a = params.c_a;

  auto tabulate = [&](const Matrix& a, const Matrix& c) {
    const LyapunovStep step = lyapunov_discretize(a, c, grid.dt());
    std::vector<Matrix> out(grid.nodes());
    out[0] = Matrix::Zero(params.n, params.n);
    for (int k = 1; k < grid.nodes(); ++k) {
      out[k] = symmetrized(step.transition * out[k - 1] * step.transition.transpose() +
                           step.increment);
    }
    return out;
  };
  path.sigma_1d = tabulate(params.a_d, params.c_d);
  path.sigma_2a = tabulate(params.a_a, params.c_a);
  return path;
}

namespace detail {

Vector attacker_estimate_rk4(const Vector& x_hat, const Vector& x_a, const Matrix& a_d,
                             const Matrix& gain, const Matrix& k0, const Matrix& k_mid,
                             const Matrix& k1, const Vector& s0, const Vector& s_mid,
                             const Vector& s1, double dt) {
  const int n = static_cast<int>(x_hat.size());
  Vector z(2 * n);
  auto rhs = [&](const Vector& v, const Matrix& k, const Vector& s) -> Vector {
    z.head(n) = x_a;
    z.tail(n) = v;
    return a_d * v + gain * (k * z + s);
  };
  const Vector f1 = rhs(x_hat, k0, s0);
  const Vector f2 = rhs(x_hat + 0.5 * dt * f1, k_mid, s_mid);
  const Vector f3 = rhs(x_hat + 0.5 * dt * f2, k_mid, s_mid);
  const Vector f4 = rhs(x_hat + dt * f3, k1, s1);
  return x_hat + (dt / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
}

Vector defender_estimate_rk4(const Vector& x_hat, const Vector& x_d, const Matrix& a_a,
                             const Matrix& gain, const Matrix& k0, const Matrix& k_mid,
                             const Matrix& k1, const Vector& s0, const Vector& s_mid,
                             const Vector& s1, double dt) {
  const int n = static_cast<int>(x_hat.size());
  Vector z(2 * n);
  auto rhs = [&](const Vector& v, const Matrix& k, const Vector& s) -> Vector {
    z.head(n) = v;
    z.tail(n) = x_d;
    return a_a * v - gain * (k * z + s);
  };
  const Vector f1 = rhs(x_hat, k0, s0);
  const Vector f2 = rhs(x_hat + 0.5 * dt * f1, k_mid, s_mid);
  const Vector f3 = rhs(x_hat + 0.5 * dt * f2, k_mid, s_mid);
  const Vector f4 = rhs(x_hat + dt * f3, k1, s1);
  return x_hat + (dt / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
}

}  // namespace detail

namespace {

void check_step(const RiccatiPath& riccati, double t, double dt) {
  if (!riccati.has_s()) throw ValidationError("estimate propagation requires the co-state");
  if (t < 0.0 || dt <= 0.0) throw ValidationError("estimate propagation: bad step");
  if (t + dt > riccati.grid.t_f * (1.0 + 1e-12)) {
    throw ValidationError("estimate propagation: step leaves the horizon");
  }
}

}  // namespace

Vector propagate_attacker_estimate(const EstimatorState& state, const Vector& x_a,
                                   const RiccatiPath& riccati, const TruncatedBlocks& blocks,
                                   double t, double dt) {
  check_step(riccati, t, dt);
  const Matrix gain = blocks.input_d() * blocks.b_hat_d.transpose();
  return detail::attacker_estimate_rk4(
      state.x_hat_1d, x_a, blocks.a_hat.bottomRightCorner(blocks.n, blocks.n), gain,
      riccati.k11_at(t), riccati.k11_at(t + 0.5 * dt), riccati.k11_at(t + dt), riccati.s_at(t),
      riccati.s_at(t + 0.5 * dt), riccati.s_at(t + dt), dt);
}

Vector propagate_defender_estimate(const EstimatorState& state, const Vector& x_d,
                                   const RiccatiPath& riccati, const TruncatedBlocks& blocks,
                                   double t, double dt) {
  check_step(riccati, t, dt);
  const Matrix gain = blocks.input_a() * blocks.b_hat_a.transpose();
  return detail::defender_estimate_rk4(
      state.x_hat_2a, x_d, blocks.a_hat.topLeftCorner(blocks.n, blocks.n), gain, riccati.k11_at(t),
      riccati.k11_at(t + 0.5 * dt), riccati.k11_at(t + dt), riccati.s_at(t),
      riccati.s_at(t + 0.5 * dt), riccati.s_at(t + dt), dt);
}

}  // namespace dadg
