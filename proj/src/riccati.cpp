#include "dadg/riccati.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "dadg/csv.hpp"

namespace dadg {

namespace {

void check_finite(const Matrix& m, double t, const char* label) {
  if (!m.allFinite() || m.cwiseAbs().maxCoeff() > kEscapeThreshold) {
    std::ostringstream os;
    os << label << ": finite escape detected at t = " << t;
    throw NumericalError(os.str(), t);
  }
}

template <typename Sample>
Sample interpolate(const std::vector<Sample>& samples, const TimeGrid& grid, double t) {
  const auto loc = grid.locate(t);
  if (loc.weight == 0.0) return samples[loc.lower];
  return (1.0 - loc.weight) * samples[loc.lower] + loc.weight * samples[loc.lower + 1];
}

// Backward RK4 for K' = -K A - A' K - Q - K D K with terminal value at t_f,
// integrated on the half-resolution grid (2M steps of dt/2). Returns all
// 2M + 1 half-grid samples; callers keep every second one as node values.
std::vector<Matrix> integrate_riccati_half(const Matrix& a, const Matrix& q, const Matrix& d,
                                           const Matrix& terminal, const TimeGrid& grid,
                                           const char* label) {
  auto rhs = [&](const Matrix& k) -> Matrix {
    return -k * a - a.transpose() * k - q - k * d * k;
  };
  const int half_nodes = 2 * grid.intervals + 1;
  std::vector<Matrix> out(half_nodes);
  Matrix k = symmetrized(terminal);
  out[half_nodes - 1] = k;
  const double h = -0.5 * grid.dt();
  for (int j = half_nodes - 1; j > 0; --j) {
    const Matrix k1 = rhs(k);
    const Matrix k2 = rhs(k + 0.5 * h * k1);
    const Matrix k3 = rhs(k + 0.5 * h * k2);
    const Matrix k4 = rhs(k + h * k3);
    k = symmetrized(k + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    check_finite(k, grid.t_f * (j - 1) / (half_nodes - 1), label);
    out[j - 1] = k;
  }
  return out;
}

std::vector<Matrix> node_samples(const std::vector<Matrix>& half, const TimeGrid& grid) {
  std::vector<Matrix> out(grid.nodes());
  for (int node = 0; node < grid.nodes(); ++node) out[node] = half[2 * node];
  return out;
}

}  // namespace

Matrix RiccatiPath::k11_at(double t) const { return interpolate(k11, grid, t); }

Vector RiccatiPath::s_at(double t) const {
  if (!has_s()) throw ValidationError("RiccatiPath: co-state not solved");
  return interpolate(s, grid, t);
}

Matrix RiccatiPath::k_full_at(double t) const {
  if (!has_full()) throw ValidationError("RiccatiPath: full K not solved");
  return interpolate(k_full, grid, t);
}

Matrix RiccatiPath::phi_a_at(double t) const {
  if (!has_phi()) throw ValidationError("RiccatiPath: weighting paths not built");
  return interpolate(phi_a, grid, t);
}

Matrix RiccatiPath::phi_d_at(double t) const {
  if (!has_phi()) throw ValidationError("RiccatiPath: weighting paths not built");
  return interpolate(phi_d, grid, t);
}

RiccatiPath solve_k11(const TruncatedBlocks& blocks, const Matrix& q11, const Matrix& qf11,
                      const TimeGrid& grid) {
  const int dim = 2 * blocks.n;
  if (q11.rows() != dim || q11.cols() != dim || qf11.rows() != dim || qf11.cols() != dim) {
    throw ValidationError("solve_k11: Q11/Qf11 must be 2n x 2n");
  }
  const Matrix d =
      blocks.b_hat_d * blocks.b_hat_d.transpose() - blocks.b_hat_a * blocks.b_hat_a.transpose();
  RiccatiPath path;
  path.grid = grid;
  path.n = blocks.n;
  path.k11_half = integrate_riccati_half(blocks.a_hat, q11, d, qf11, grid, "solve_k11");
  path.k11 = node_samples(path.k11_half, grid);
  return path;
}

void solve_s(RiccatiPath& path, const TruncatedBlocks& blocks, const Matrix& q12,
             const Matrix& qf12, const AssetTrajectory& asset) {
  const int n = blocks.n;
  const TimeGrid& grid = path.grid;
  if (path.k11.empty() || path.k11_half.empty()) {
    throw ValidationError("solve_s: K11 must be solved first");
  }
  if (q12.rows() != 2 * n || q12.cols() != n || qf12.rows() != 2 * n || qf12.cols() != n) {
    throw ValidationError("solve_s: Q12/Qf12 must be 2n x n");
  }
  asset.validate(n, grid.t_f);
  const std::vector<Vector> xs = asset.sample_half_grid(grid);

  const Matrix a_t = blocks.a_hat.transpose();
  const Matrix d =
      blocks.b_hat_d * blocks.b_hat_d.transpose() - blocks.b_hat_a * blocks.b_hat_a.transpose();
  auto rhs = [&](const Matrix& k_stage, const Vector& s_stage, const Vector& x_stage) -> Vector {
    return (-a_t - k_stage * d) * s_stage - q12 * x_stage;
  };

  path.s.assign(grid.nodes(), Vector::Zero(2 * n));
  Vector s = qf12 * xs[2 * grid.intervals];
  path.s[grid.intervals] = s;

  const double h = -grid.dt();
  for (int node = grid.intervals; node > 0; --node) {
    const Matrix& k_hi = path.k11_half[2 * node];
    const Matrix& k_mid = path.k11_half[2 * node - 1];
    const Matrix& k_lo = path.k11_half[2 * node - 2];
    const Vector& x_hi = xs[2 * node];
    const Vector& x_mid = xs[2 * node - 1];
    const Vector& x_lo = xs[2 * node - 2];

    const Vector s1 = rhs(k_hi, s, x_hi);
    const Vector s2 = rhs(k_mid, s + 0.5 * h * s1, x_mid);
    const Vector s3 = rhs(k_mid, s + 0.5 * h * s2, x_mid);
    const Vector s4 = rhs(k_lo, s + h * s3, x_lo);
    s = s + (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    if (!s.allFinite() || s.cwiseAbs().maxCoeff() > kEscapeThreshold) {
      throw NumericalError("solve_s: finite escape detected", grid.node(node - 1));
    }
    path.s[node - 1] = s;
  }
}

RiccatiPath solve_full_k(const AggregateSystem& aggregate, const TimeGrid& grid) {
  if (!aggregate.has_asset_generator) {
    throw ValidationError("solve_full_k: requires a linear asset (generator form)");
  }
  const Matrix d =
      aggregate.b_d * aggregate.b_d.transpose() - aggregate.b_a * aggregate.b_a.transpose();
  RiccatiPath path;
  path.grid = grid;
  path.n = aggregate.n;
  path.k_full = node_samples(
      integrate_riccati_half(aggregate.a, aggregate.q, d, aggregate.q_f, grid, "solve_full_k"),
      grid);
  return path;
}

Matrix closed_form_k11(double omega_a, double omega_d, double b_a, double b_d, double t_f,
                       double t) {
  if (!(omega_a > 0.0) || !(omega_d > 0.0)) {
    throw ValidationError("closed_form_k11: omega_a and omega_d must be positive");
  }
  if (t < 0.0 || t > t_f) throw ValidationError("closed_form_k11: t must lie in [0, t_f]");

  // K11^{-1} integrates linearly in the time to go tau = t_f - t, so the
  // scalar denominator of k is the quadratic alpha tau^2 + beta tau + gamma.
  const double ba2 = b_a * b_a;
  const double bd2 = b_d * b_d;
  const double alpha = (omega_a * ba2) * (-omega_a * omega_d * bd2);
  const double beta = (omega_a * ba2) * (omega_d - omega_a) - omega_a * omega_d * bd2;
  const double gamma = -omega_a;

  auto escape_at = [&](double tau_root) {
    std::ostringstream os;
    os << "closed_form_k11: denominator vanishes at t = " << t_f - tau_root;
    throw NumericalError(os.str(), t_f - tau_root);
  };
  auto in_horizon = [&](double tau) { return tau >= 0.0 && tau <= t_f; };
  if (alpha != 0.0) {
    const double disc = beta * beta - 4.0 * alpha * gamma;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double root : {(-beta - sq) / (2.0 * alpha), (-beta + sq) / (2.0 * alpha)}) {
        if (in_horizon(root)) escape_at(root);
      }
    }
  } else if (beta != 0.0) {
    if (in_horizon(-gamma / beta)) escape_at(-gamma / beta);
  }

  const double tau = t_f - t;
  const double kappa1 = -bd2 * tau * omega_a + 1.0 - omega_a / omega_d;
  const double kappa2 = ba2 * tau * omega_a + 1.0;
  const double k =
      omega_a * omega_d /
      ((omega_a * ba2 * tau + 1.0) * (-omega_a * omega_d * bd2 * tau + omega_d - omega_a) -
       omega_d);

  const Matrix id = Matrix::Identity(2, 2);
  Matrix out = Matrix::Zero(4, 4);
  out.block(0, 0, 2, 2) = k * kappa1 * id;
  out.block(0, 2, 2, 2) = -k * id;
  out.block(2, 0, 2, 2) = -k * id;
  out.block(2, 2, 2, 2) = k * kappa2 * id;
  return out;
}

void weighting_paths(RiccatiPath& path, const TruncatedBlocks& blocks) {
  if (path.k11.empty()) throw ValidationError("weighting_paths: K11 must be solved first");
  const Matrix gram_a = blocks.input_a() * blocks.input_a().transpose();
  const Matrix gram_d = blocks.input_d() * blocks.input_d().transpose();
  path.phi_a.resize(path.k11.size());
  path.phi_d.resize(path.k11.size());
  for (std::size_t i = 0; i < path.k11.size(); ++i) {
    const Matrix ur = path.k11[i].block(0, path.n, path.n, path.n);
    path.phi_a[i] = symmetrized(ur.transpose() * gram_a * ur);
    path.phi_d[i] = symmetrized(ur * gram_d * ur.transpose());
  }
}

void write_riccati_csv(const RiccatiPath& path, std::ostream& out) {
  const int dim = 2 * path.n;
  std::vector<std::string> header{"t"};
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      header.push_back("k11_" + std::to_string(r) + "_" + std::to_string(c));
  if (path.has_s())
    for (int r = 0; r < dim; ++r) header.push_back("s_" + std::to_string(r));
  if (path.has_phi()) {
    header.push_back("tr_phi_a");
    header.push_back("tr_phi_d");
  }
  csv::write_row(out, header);

  std::vector<double> row;
  for (int node = 0; node < path.grid.nodes(); ++node) {
    row.clear();
    row.push_back(path.grid.node(node));
    const Matrix& k = path.k11[node];
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) row.push_back(k(r, c));
    if (path.has_s())
      for (int r = 0; r < dim; ++r) row.push_back(path.s[node](r));
    if (path.has_phi()) {
      row.push_back(path.phi_a[node].trace());
      row.push_back(path.phi_d[node].trace());
    }
    csv::write_row(out, row);
  }
}

}  // namespace dadg
