#include "dadg/game_model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>
#include <utility>

namespace dadg {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void require_shape(const Matrix& m, int rows, int cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " must be " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

}  // namespace

void GameParameters::validate() const {
  require(n >= 1, "GameParameters: n must be >= 1");
  require(t_f > 0.0, "GameParameters: t_f must be positive");
  require(obs_cost >= 0.0, "GameParameters: obs_cost must be nonnegative");
  require(omega_a_i >= 0.0 && omega_d_i >= 0.0 && omega_a >= 0.0 && omega_d >= 0.0,
          "GameParameters: weights must be nonnegative");
  require_shape(a_a, n, n, "A_a");
  require_shape(a_d, n, n, "A_d");
  require(b_tilde_a.rows() == n && b_tilde_a.cols() >= 1, "B_tilde_a must have n rows");
  require(b_tilde_d.rows() == n && b_tilde_d.cols() >= 1, "B_tilde_d must have n rows");
  require_shape(c_a, n, n, "C_a");
  require_shape(c_d, n, n, "C_d");
  require(x_a0.size() == n, "x_a0 must have length n");
  require(x_d0.size() == n, "x_d0 must have length n");
}

AssetTrajectory AssetTrajectory::linear(Matrix a_s, Vector x_s0) {
  AssetTrajectory out;
  out.kind = Kind::linear;
  out.a_s = std::move(a_s);
  out.x_s0 = std::move(x_s0);
  return out;
}

AssetTrajectory AssetTrajectory::sampled(std::vector<double> times, std::vector<Vector> values) {
  AssetTrajectory out;
  out.kind = Kind::sampled;
  out.times = std::move(times);
  out.values = std::move(values);
  return out;
}

void AssetTrajectory::validate(int n, double t_f) const {
  if (kind == Kind::linear) {
    require_shape(a_s, n, n, "A_s");
    require(x_s0.size() == n, "x_s0 must have length n");
    return;
  }
  require(times.size() == values.size() && times.size() >= 2,
          "sampled asset needs matching times/values with at least two samples");
  require(times.front() == 0.0, "sampled asset must start at t = 0");
  require(times.back() == t_f, "sampled asset must end at t = t_f");
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    require(times[i] < times[i + 1], "sampled asset times must be strictly increasing");
  }
  for (const Vector& v : values) {
    require(v.size() == n, "sampled asset values must have length n");
  }
}

Vector AssetTrajectory::value_at(double t) const {
  if (kind == Kind::linear) {
    return (a_s * t).exp() * x_s0;
  }
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  std::size_t lo = hi - 1;
  double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * values[lo] + w * values[hi];
}

std::vector<Vector> AssetTrajectory::sample_half_grid(const TimeGrid& grid) const {
  const int count = 2 * grid.intervals + 1;
  std::vector<Vector> out;
  out.reserve(count);
  if (kind == Kind::linear) {
    const Matrix half_step = (a_s * (0.5 * grid.dt())).exp();
    Vector x = x_s0;
    out.push_back(x);
    for (int j = 1; j < count; ++j) {
      x = half_step * x;
      out.push_back(x);
    }
  } else {
    for (int j = 0; j < count; ++j) {
      out.push_back(value_at(grid.t_f * j / (count - 1)));
    }
  }
  return out;
}

Matrix build_weight_matrix(double w1, double w2, int n) {
  if (n < 1) throw ValidationError("build_weight_matrix: n must be >= 1");
  if (w1 < 0.0 || w2 < 0.0) throw ValidationError("build_weight_matrix: weights must be nonnegative");
  const Matrix id = Matrix::Identity(n, n);
  Matrix q = Matrix::Zero(3 * n, 3 * n);
  q.block(0, 0, n, n) = (w1 - w2) * id;
  q.block(0, n, n, n) = w2 * id;
  q.block(n, 0, n, n) = w2 * id;
  q.block(0, 2 * n, n, n) = -w1 * id;
  q.block(2 * n, 0, n, n) = -w1 * id;
  q.block(n, n, n, n) = -w2 * id;
  q.block(2 * n, 2 * n, n, n) = w1 * id;
  return q;
}

AggregateSystem build_aggregate(const GameParameters& params, const AssetTrajectory& asset) {
  params.validate();
  asset.validate(params.n, params.t_f);
  const int n = params.n;

  AggregateSystem sys;
  sys.n = n;
  sys.a = Matrix::Zero(3 * n, 3 * n);
  sys.a.block(0, 0, n, n) = params.a_a;
  sys.a.block(n, n, n, n) = params.a_d;
  sys.has_asset_generator = asset.kind == AssetTrajectory::Kind::linear;
  if (sys.has_asset_generator) {
    sys.a.block(2 * n, 2 * n, n, n) = asset.a_s;
  }

  sys.b_a = Matrix::Zero(3 * n, params.b_tilde_a.cols());
  sys.b_a.topRows(n) = params.b_tilde_a;
  sys.b_d = Matrix::Zero(3 * n, params.b_tilde_d.cols());
  sys.b_d.middleRows(n, n) = params.b_tilde_d;

  sys.c = Matrix::Zero(3 * n, 3 * n);
  sys.c.block(0, 0, n, n) = params.c_a;
  sys.c.block(n, n, n, n) = params.c_d;

  sys.q = build_weight_matrix(params.omega_a_i, params.omega_d_i, n);
  sys.q_f = build_weight_matrix(params.omega_a, params.omega_d, n);
  return sys;
}

TruncatedBlocks truncated_blocks(const GameParameters& params) {
  params.validate();
  const int n = params.n;
  TruncatedBlocks blocks;
  blocks.n = n;
  blocks.a_hat = Matrix::Zero(2 * n, 2 * n);
  blocks.a_hat.topLeftCorner(n, n) = params.a_a;
  blocks.a_hat.bottomRightCorner(n, n) = params.a_d;
  blocks.b_hat_a = Matrix::Zero(2 * n, params.b_tilde_a.cols());
  blocks.b_hat_a.topRows(n) = params.b_tilde_a;
  blocks.b_hat_d = Matrix::Zero(2 * n, params.b_tilde_d.cols());
  blocks.b_hat_d.bottomRows(n) = params.b_tilde_d;
  return blocks;
}

}  // namespace dadg
