#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <random>
#include <sstream>

#include "dadg/game_model.hpp"
#include "dadg/riccati.hpp"
#include "support.hpp"

using namespace dadg;
using dadg::testing::case_study_asset;
using dadg::testing::case_study_params;

namespace {

Matrix closed_form_at(const GameParameters& p, double t) {
  return closed_form_k11(p.omega_a, p.omega_d, p.b_tilde_a(0, 0), p.b_tilde_d(0, 0), p.t_f, t);
}

double max_relative_error(const RiccatiPath& path, const GameParameters& p) {
  double worst = 0.0;
  for (int node = 0; node < path.grid.nodes(); ++node) {
    const Matrix expected = closed_form_at(p, path.grid.node(node));
    const double err = (path.k11[node] - expected).cwiseAbs().maxCoeff() /
                       expected.cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

TEST_CASE("solve_k11: terminal node equals Qf11 exactly") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const auto grid = TimeGrid::uniform(p.t_f, 200);
  const RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), grid);
  CHECK((path.k11.back() - agg.qf11()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed form: terminal value reproduces the weight partition") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> omega(0.5, 8.0);
  std::uniform_real_distribution<double> gain(0.2, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double omega_a = omega(gen), omega_d = omega(gen);
    const double b = gain(gen);
    const Matrix k_tf = closed_form_k11(omega_a, omega_d, b, b, 10.0, 10.0);
    const Matrix qf11 = build_weight_matrix(omega_a, omega_d, 2).topLeftCorner(4, 4);
    const double scale = qf11.cwiseAbs().maxCoeff();
    CHECK((k_tf - qf11).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("solve_k11 matches the closed form on the case study") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());

  const RiccatiPath fine = solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 2000));
  const double err_fine = max_relative_error(fine, p);
  CHECK(err_fine <= 1e-6);

  // Fourth-order convergence: halving the step cuts the error ~16x.
  const RiccatiPath coarse =
      solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 1000));
  const double ratio = max_relative_error(coarse, p) / err_fine;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("solve_k11: cancelling input grams freeze the solution") {
  // With A^ = 0, Q11 = 0 and equal B^ grams the right-hand side vanishes.
  TruncatedBlocks blocks;
  blocks.n = 1;
  blocks.a_hat = Matrix::Zero(2, 2);
  blocks.b_hat_a = Matrix::Ones(2, 1);
  blocks.b_hat_d = Matrix::Ones(2, 1);
  Matrix qf11(2, 2);
  qf11 << 2.0, 1.0, 1.0, -1.0;
  const auto grid = TimeGrid::uniform(3.0, 150);
  const RiccatiPath path = solve_k11(blocks, Matrix::Zero(2, 2), qf11, grid);
  for (const Matrix& k : path.k11) {
    CHECK((k - qf11).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("solve_k11: every stored sample is exactly symmetric") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 500));
  for (const Matrix& k : path.k11) {
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("finite escape detected when the maneuverability gap is too wide") {
  // Equal input gains keep the case-study solution bounded for every weight
  // choice; a strong attacker against a weak defender does not.
  GameParameters p = case_study_params(/*omega_a=*/1.0);
  p.b_tilde_a = 1.0 * Matrix::Identity(2, 2);
  p.b_tilde_d = 0.2 * Matrix::Identity(2, 2);
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  CHECK_THROWS_AS(solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 2000)),
                  NumericalError);
  try {
    solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 2000));
  } catch (const NumericalError& e) {
    // The closed-form denominator first vanishes near t ~ 9.45.
    CHECK(e.when() > 9.0);
    CHECK(e.when() < 10.0);
    CHECK(std::string(e.what()).find("finite escape") != std::string::npos);
  }
  CHECK_THROWS_AS(closed_form_k11(1.0, 3.0, 1.0, 0.2, 10.0, 0.0), NumericalError);
}

TEST_CASE("closed form: squared gain grows monotonically toward the horizon") {
  // With equal input gains the denominator magnitude grows with time to go,
  // so observing late is always worth more on the case study.
  for (double omega_a : {1.0, 2.0, 4.0, 8.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 10.0 * i / 1000;
      const Matrix k = closed_form_k11(omega_a, 3.0, 0.5, 0.5, 10.0, t);
      const double k2 = k(0, 2) * k(0, 2);
      CHECK(k2 >= prev);
      prev = k2;
    }
    CHECK(prev == doctest::Approx(9.0));  // k(t_f) = -omega_d
  }
}

TEST_CASE("closed form: interior peak location matches the denominator vertex") {
  // Unequal gains can move the extremum of k^2 inside the horizon; the peak
  // then sits at the vertex of the denominator quadratic in time to go.
  const double omega_a = 1.0, omega_d = 3.0, b_a = 0.5, t_f = 10.0;
  const double b_d = std::sqrt(0.15);
  const double alpha = -omega_a * omega_a * omega_d * b_a * b_a * b_d * b_d;
  const double beta = omega_a * b_a * b_a * (omega_d - omega_a) - omega_a * omega_d * b_d * b_d;
  const double tau_star = -beta / (2.0 * alpha);
  REQUIRE(tau_star > 0.0);

  double best_t = 0.0, best_val = -1.0;
  const int samples = 20000;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_f * i / samples;
    const Matrix k = closed_form_k11(omega_a, omega_d, b_a, b_d, t_f, t);
    const double k2 = k(0, 2) * k(0, 2);
    if (k2 > best_val) {
      best_val = k2;
      best_t = t;
    }
  }
  CHECK(best_t == doctest::Approx(t_f - tau_star).epsilon(1e-3));
}

TEST_CASE("solve_s: zero forcing and zero terminal give the zero co-state") {
  GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const auto grid = TimeGrid::uniform(p.t_f, 400);
  RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), grid);
  // Stationary asset at the origin: x_s(t_f) = 0 and Q12 = 0.
  const auto asset = AssetTrajectory::linear(Matrix::Zero(2, 2), Vector::Zero(2));
  solve_s(path, blocks, agg.q12(), agg.qf12(), asset);
  for (const Vector& s : path.s) {
    CHECK(s.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("solve_s: grid refinement shows fourth-order convergence") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  Vector c(2);
  c << 1.5, -0.5;
  const auto asset = AssetTrajectory::linear(Matrix::Zero(2, 2), c);

  auto costate_at_zero = [&](int intervals) {
    const auto grid = TimeGrid::uniform(p.t_f, intervals);
    RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), grid);
    solve_s(path, blocks, agg.q12(), agg.qf12(), asset);
    return path.s.front();
  };

  const Vector reference = costate_at_zero(4000);
  const double err_coarse = (costate_at_zero(250) - reference).norm();
  const double err_fine = (costate_at_zero(500) - reference).norm();
  const double ratio = err_coarse / err_fine;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 22.0);
}

TEST_CASE("solve_s agrees with the cross-coupling solution K12 x_s") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const auto asset = case_study_asset();
  const int intervals = 2000;
  const auto grid = TimeGrid::uniform(p.t_f, intervals);

  RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), grid);
  solve_s(path, blocks, agg.q12(), agg.qf12(), asset);

  // Independent reference: integrate the coupled (K11, K12) pair backward on
  // a single grid and form s(t) = K12(t) x_s(t).
  const Matrix a_hat_t = blocks.a_hat.transpose();
  const Matrix d = blocks.b_hat_d * blocks.b_hat_d.transpose() -
                   blocks.b_hat_a * blocks.b_hat_a.transpose();
  const Matrix q11 = agg.q11();
  const Matrix q12 = agg.q12();
  Matrix k11 = agg.qf11();
  Matrix k12 = agg.qf12();
  std::vector<Matrix> k12_nodes(grid.nodes());
  k12_nodes[intervals] = k12;
  const double h = -grid.dt();
  auto k11_rhs = [&](const Matrix& k) { return (-k * blocks.a_hat - a_hat_t * k - q11 - k * d * k).eval(); };
  auto k12_rhs = [&](const Matrix& k, const Matrix& m) {
    return (-m * asset.a_s - a_hat_t * m - q12 - k * d * m).eval();
  };
  for (int node = intervals; node > 0; --node) {
    const Matrix a1 = k11_rhs(k11), b1 = k12_rhs(k11, k12);
    const Matrix a2 = k11_rhs(k11 + 0.5 * h * a1), b2 = k12_rhs(k11 + 0.5 * h * a1, k12 + 0.5 * h * b1);
    const Matrix a3 = k11_rhs(k11 + 0.5 * h * a2), b3 = k12_rhs(k11 + 0.5 * h * a2, k12 + 0.5 * h * b2);
    const Matrix a4 = k11_rhs(k11 + h * a3), b4 = k12_rhs(k11 + h * a3, k12 + h * b3);
    k11 = k11 + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    k12 = k12 + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    k12_nodes[node - 1] = k12;
  }

  double worst = 0.0;
  for (int node = 0; node <= intervals; node += 50) {
    const double t = grid.node(node);
    const Vector expected = k12_nodes[node] * asset.value_at(t);
    const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
    worst = std::max(worst, (path.s[node] - expected).cwiseAbs().maxCoeff() / scale);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("solve_full_k: terminal value and zero-weight instance") {
  const GameParameters p = case_study_params();
  const auto agg = build_aggregate(p, case_study_asset());
  const auto grid = TimeGrid::uniform(p.t_f, 300);
  const RiccatiPath full = solve_full_k(agg, grid);
  CHECK((full.k_full.back() - agg.q_f).cwiseAbs().maxCoeff() == 0.0);

  AggregateSystem zero = agg;
  zero.q.setZero();
  zero.q_f.setZero();
  const RiccatiPath trivial = solve_full_k(zero, grid);
  for (const Matrix& k : trivial.k_full) {
    CHECK(k.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("solve_full_k: leading block agrees with the decomposed solve") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const auto grid = TimeGrid::uniform(p.t_f, 2000);
  const RiccatiPath small = solve_k11(blocks, agg.q11(), agg.qf11(), grid);
  const RiccatiPath full = solve_full_k(agg, grid);
  double worst = 0.0;
  for (int node = 0; node < grid.nodes(); ++node) {
    worst = std::max(worst,
                     (full.k_full[node].topLeftCorner(4, 4) - small.k11[node]).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("solve_full_k requires the asset generator") {
  const GameParameters p = case_study_params();
  std::vector<double> times{0.0, p.t_f};
  std::vector<Vector> values{Vector::Zero(2), Vector::Zero(2)};
  const auto sampled = AssetTrajectory::sampled(times, values);
  const auto agg = build_aggregate(p, sampled);
  CHECK_THROWS_AS(solve_full_k(agg, TimeGrid::uniform(p.t_f, 100)), ValidationError);
}

TEST_CASE("weighting paths: case study gives k^2 b^2 I") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 2000));
  weighting_paths(path, blocks);
  for (int node = 0; node < path.grid.nodes(); node += 100) {
    const Matrix cf = closed_form_at(p, path.grid.node(node));
    const double k_scalar = -cf(0, 2);
    const Matrix expected = k_scalar * k_scalar * 0.25 * Matrix::Identity(2, 2);
    CHECK((path.phi_a[node] - expected).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, expected(0, 0)));
  }
}

TEST_CASE("weighting paths: block-diagonal K11 keeps phi at zero") {
  // omega_d = 0 leaves the terminal weight block diagonal; the upper-right
  // block then stays zero along the whole path.
  GameParameters p = case_study_params();
  p.omega_d = 0.0;
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 500));
  weighting_paths(path, blocks);
  for (const Matrix& phi : path.phi_a) {
    CHECK(phi.cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("weighting paths: positive semi-definite at every node") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 500));
  weighting_paths(path, blocks);
  for (int node = 0; node < path.grid.nodes(); node += 25) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig_a(path.phi_a[node]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig_d(path.phi_d[node]);
    CHECK(eig_a.eigenvalues().minCoeff() >= -1e-10);
    CHECK(eig_d.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("riccati path: interpolation hits nodes exactly") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), TimeGrid::uniform(p.t_f, 100));
  for (int node : {0, 17, 50, 100}) {
    CHECK((path.k11_at(path.grid.node(node)) - path.k11[node]).cwiseAbs().maxCoeff() == 0.0);
  }
  const Matrix mid = path.k11_at(0.5 * (path.grid.node(3) + path.grid.node(4)));
  const Matrix avg = 0.5 * (path.k11[3] + path.k11[4]);
  CHECK((mid - avg).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("riccati CSV export") {
  const GameParameters p = case_study_params();
  const auto blocks = truncated_blocks(p);
  const auto agg = build_aggregate(p, case_study_asset());
  const auto grid = TimeGrid::uniform(p.t_f, 10);
  RiccatiPath path = solve_k11(blocks, agg.q11(), agg.qf11(), grid);
  solve_s(path, blocks, agg.q12(), agg.qf12(), case_study_asset());
  weighting_paths(path, blocks);

  std::ostringstream out;
  write_riccati_csv(path, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("t,k11_0_0,", 0) == 0);
  CHECK(header.find("s_0") != std::string::npos);
  CHECK(header.find("tr_phi_a,tr_phi_d") != std::string::npos);
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == grid.nodes());
}
