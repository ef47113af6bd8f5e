#include "dadg/simulator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "dadg/csv.hpp"
#include "dadg/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dadg {

namespace {

// Per-config precomputation shared by every trial: Riccati/co-state samples at
// half-step resolution, asset samples, snapped schedules, constant gains.
struct SimPrep {
  int steps = 0;
  double dt = 0.0;
  std::vector<Matrix> k11;        // 2*steps + 1 samples
  std::vector<Vector> s;
  std::vector<Vector> x_s;
  std::vector<Matrix> mis_gain_a;  // B~_a' K11ur(t_k), per full step
  std::vector<Matrix> mis_gain_d;  // B~_d' K11ur(t_k)', per full step
  Matrix est_gain_a;  // B~_d B^_d'
  Matrix est_gain_d;  // B~_a B^_a'
  Matrix noise_a, noise_d;  // C sqrt(dt)
  std::vector<int> obs_a, obs_d;  // snapped step indices, ascending
  double max_snap = 0.0;
};

std::vector<int> snap_schedule(const ObservationSchedule& schedule, int steps, double dt,
                               double* max_snap) {
  std::vector<int> out;
  out.reserve(schedule.instants.size());
  for (double t : schedule.instants) {
    int idx = static_cast<int>(std::llround(t / dt));
    idx = std::clamp(idx, 0, steps);
    *max_snap = std::max(*max_snap, std::abs(t - idx * dt));
    out.push_back(idx);
  }
  return out;
}

SimPrep prepare(const GameSystem& system, const SimulationConfig& config) {
  const GameParameters& p = system.params;
  if (!system.riccati.has_s() || !system.riccati.has_phi()) {
    throw ValidationError("simulate: game system is missing the co-state or phi paths");
  }
  config.schedule_a.validate(p.t_f);
  config.schedule_d.validate(p.t_f);
  if (config.schedule_a.player != Player::attacker || config.schedule_d.player != Player::defender) {
    throw ValidationError("simulate: schedule player tags are swapped");
  }

  SimPrep prep;
  prep.steps = config.steps_for(p.t_f);
  prep.dt = config.dt;

  const int half_count = 2 * prep.steps + 1;
  prep.k11.reserve(half_count);
  prep.s.reserve(half_count);
  for (int j = 0; j < half_count; ++j) {
    const double t = std::min(p.t_f, 0.5 * prep.dt * j);
    prep.k11.push_back(system.riccati.k11_at(t));
    prep.s.push_back(system.riccati.s_at(t));
  }

  prep.x_s.reserve(half_count);
  if (system.asset.kind == AssetTrajectory::Kind::linear) {
    const Matrix half_step = (system.asset.a_s * (0.5 * prep.dt)).exp();
    Vector x = system.asset.x_s0;
    prep.x_s.push_back(x);
    for (int j = 1; j < half_count; ++j) {
      x = half_step * x;
      prep.x_s.push_back(x);
    }
  } else {
    for (int j = 0; j < half_count; ++j) {
      prep.x_s.push_back(system.asset.value_at(std::min(p.t_f, 0.5 * prep.dt * j)));
    }
  }

  const Matrix input_a = system.blocks.input_a();
  const Matrix input_d = system.blocks.input_d();
  prep.mis_gain_a.reserve(prep.steps + 1);
  prep.mis_gain_d.reserve(prep.steps + 1);
  for (int k = 0; k <= prep.steps; ++k) {
    const Matrix ur = prep.k11[2 * k].block(0, p.n, p.n, p.n);
    prep.mis_gain_a.push_back(input_a.transpose() * ur);
    prep.mis_gain_d.push_back(input_d.transpose() * ur.transpose());
  }

  prep.est_gain_a = input_d * system.blocks.b_hat_d.transpose();
  prep.est_gain_d = input_a * system.blocks.b_hat_a.transpose();
  prep.noise_a = std::sqrt(prep.dt) * p.c_a;
  prep.noise_d = std::sqrt(prep.dt) * p.c_d;
  prep.obs_a = snap_schedule(config.schedule_a, prep.steps, prep.dt, &prep.max_snap);
  prep.obs_d = snap_schedule(config.schedule_d, prep.steps, prep.dt, &prep.max_snap);
  return prep;
}

std::pair<Vector, Vector> controls_from(const Matrix& k11, const Vector& s,
                                        const TruncatedBlocks& blocks, const Vector& x_a,
                                        const Vector& x_hat_1d, const Vector& x_hat_2a,
                                        const Vector& x_d) {
  const int n = blocks.n;
  Vector z(2 * n);
  z.head(n) = x_a;
  z.tail(n) = x_hat_1d;
  Vector u_a = -blocks.b_hat_a.transpose() * (k11 * z + s);
  z.head(n) = x_hat_2a;
  z.tail(n) = x_d;
  Vector u_d = blocks.b_hat_d.transpose() * (k11 * z + s);
  return {std::move(u_a), std::move(u_d)};
}

TrialStats run_trial(const GameSystem& system, const SimulationConfig& config,
                     const SimPrep& prep, int trial, SimulationTrace* trace) {
  const GameParameters& p = system.params;
  const int n = p.n;
  const bool decoupled = config.estimator == EstimatorModel::decoupled;

  Vector x_a = p.x_a0;
  Vector x_d = p.x_d0;
  // Both players know x0, so estimates start exact and errors start at zero.
  Vector err_1d = Vector::Zero(n);  // x_d - x^_1d, decoupled model
  Vector err_2a = Vector::Zero(n);  // x_a - x^_2a
  Vector x_hat_1d = p.x_d0;         // coupled model
  Vector x_hat_2a = p.x_a0;
  Vector z_a(n), z_d(n);

  double cost = 0.0, mis_a = 0.0, mis_d = 0.0;
  std::size_t ia = 0, id = 0;

  if (trace) {
    trace->dt = prep.dt;
    trace->steps = prep.steps;
    trace->obs_steps_a = prep.obs_a;
    trace->obs_steps_d = prep.obs_d;
    trace->max_snap_error = prep.max_snap;
  }

  for (int k = 0; k < prep.steps; ++k) {
    const double t = k * prep.dt;
    while (ia < prep.obs_a.size() && prep.obs_a[ia] == k) {
      err_1d.setZero();
      x_hat_1d = x_d;
      ++ia;
    }
    while (id < prep.obs_d.size() && prep.obs_d[id] == k) {
      err_2a.setZero();
      x_hat_2a = x_a;
      ++id;
    }
    if (decoupled) {
      x_hat_1d = x_d - err_1d;
      x_hat_2a = x_a - err_2a;
    }

    auto [u_a, u_d] = controls_from(prep.k11[2 * k], prep.s[2 * k], system.blocks, x_a, x_hat_1d,
                                    x_hat_2a, x_d);

    // Left-endpoint rule, matching the state update order.
    cost += prep.dt * (u_a.squaredNorm() - u_d.squaredNorm() +
                       p.omega_a_i * (x_a - prep.x_s[2 * k]).squaredNorm() -
                       p.omega_d_i * (x_d - x_a).squaredNorm());
    mis_a += prep.dt * (prep.mis_gain_a[k] * (x_d - x_hat_1d)).squaredNorm();
    mis_d += prep.dt * (prep.mis_gain_d[k] * (x_a - x_hat_2a)).squaredNorm();

    if (trace) {
      trace->t.push_back(t);
      trace->x_a.push_back(x_a);
      trace->x_d.push_back(x_d);
      trace->x_s.push_back(prep.x_s[2 * k]);
      trace->x_hat_1d.push_back(x_hat_1d);
      trace->x_hat_2a.push_back(x_hat_2a);
      trace->u_a.push_back(u_a);
      trace->u_d.push_back(u_d);
    }

    if (!decoupled) {
      x_hat_1d = detail::attacker_estimate_rk4(x_hat_1d, x_a, p.a_d, prep.est_gain_a,
                                               prep.k11[2 * k], prep.k11[2 * k + 1],
                                               prep.k11[2 * k + 2], prep.s[2 * k],
                                               prep.s[2 * k + 1], prep.s[2 * k + 2], prep.dt);
      x_hat_2a = detail::defender_estimate_rk4(x_hat_2a, x_d, p.a_a, prep.est_gain_d,
                                               prep.k11[2 * k], prep.k11[2 * k + 1],
                                               prep.k11[2 * k + 2], prep.s[2 * k],
                                               prep.s[2 * k + 1], prep.s[2 * k + 2], prep.dt);
    }

    for (int c = 0; c < n; ++c) {
      z_a(c) = rng::standard_normal(config.master_seed, trial, k, c);
      z_d(c) = rng::standard_normal(config.master_seed, trial, k, n + c);
    }
    x_a += prep.dt * (p.a_a * x_a + p.b_tilde_a * u_a) + prep.noise_a * z_a;
    x_d += prep.dt * (p.a_d * x_d + p.b_tilde_d * u_d) + prep.noise_d * z_d;
    if (decoupled) {
      // Errors see the same noise increments as the states they shadow.
      err_1d += prep.dt * (p.a_d * err_1d) + prep.noise_d * z_d;
      err_2a += prep.dt * (p.a_a * err_2a) + prep.noise_a * z_a;
    }

    if (!x_a.allFinite() || !x_d.allFinite()) {
      std::ostringstream os;
      os << "simulate_trial: non-finite state at t = " << t + prep.dt << " (trial " << trial
         << ")";
      throw NumericalError(os.str(), t + prep.dt);
    }
  }

  // Observations snapped to the final step reset the estimate before the
  // terminal cost is charged.
  while (ia < prep.obs_a.size() && prep.obs_a[ia] == prep.steps) {
    err_1d.setZero();
    x_hat_1d = x_d;
    ++ia;
  }
  while (id < prep.obs_d.size() && prep.obs_d[id] == prep.steps) {
    err_2a.setZero();
    x_hat_2a = x_a;
    ++id;
  }
  if (decoupled) {
    x_hat_1d = x_d - err_1d;
    x_hat_2a = x_a - err_2a;
  }

  cost += p.omega_a * (x_a - prep.x_s[2 * prep.steps]).squaredNorm() -
          p.omega_d * (x_d - x_a).squaredNorm();
  cost += p.obs_cost * (config.schedule_a.count() - config.schedule_d.count());

  if (trace) {
    auto [u_a, u_d] = controls_from(prep.k11[2 * prep.steps], prep.s[2 * prep.steps],
                                    system.blocks, x_a, x_hat_1d, x_hat_2a, x_d);
    trace->t.push_back(prep.steps * prep.dt);
    trace->x_a.push_back(x_a);
    trace->x_d.push_back(x_d);
    trace->x_s.push_back(prep.x_s[2 * prep.steps]);
    trace->x_hat_1d.push_back(x_hat_1d);
    trace->x_hat_2a.push_back(x_hat_2a);
    trace->u_a.push_back(u_a);
    trace->u_d.push_back(u_d);
    trace->realized_cost = cost;
    trace->mismatch_a = mis_a;
    trace->mismatch_d = mis_d;
  }
  return TrialStats{cost, mis_a, mis_d};
}

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// int_0^{t_f} Tr(K(t) CC') dt on the stored grid: Simpson pairs plus a
// trapezoid tail when the node count is even.
double trace_noise_term(const RiccatiPath& riccati, const Matrix& cc_t) {
  const int m = riccati.grid.intervals;
  const double h = riccati.grid.dt();
  std::vector<double> g(m + 1);
  for (int i = 0; i <= m; ++i) g[i] = riccati.k_full[i].cwiseProduct(cc_t).sum();
  double acc = 0.0;
  int i = 0;
  for (; i + 2 <= m; i += 2) acc += (h / 3.0) * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
  if (i < m) acc += 0.5 * h * (g[m - 1] + g[m]);
  return acc;
}

}  // namespace

GameSystem make_game_system(const GameParameters& params, const AssetTrajectory& asset,
                            const TimeGrid& grid) {
  params.validate();
  asset.validate(params.n, params.t_f);
  if (grid.t_f != params.t_f) throw ValidationError("make_game_system: grid horizon mismatch");

  GameSystem system{params, asset, build_aggregate(params, asset), truncated_blocks(params),
                    RiccatiPath{}, CovariancePath{}};
  system.riccati =
      solve_k11(system.blocks, system.aggregate.q11(), system.aggregate.qf11(), grid);
  solve_s(system.riccati, system.blocks, system.aggregate.q12(), system.aggregate.qf12(), asset);
  weighting_paths(system.riccati, system.blocks);
  if (system.aggregate.has_asset_generator) {
    system.riccati.k_full = solve_full_k(system.aggregate, grid).k_full;
  }
  system.covariance = build_covariance_path(params, grid);
  return system;
}

int SimulationConfig::steps_for(double t_f) const {
  if (!(dt > 0.0)) throw ValidationError("SimulationConfig: dt must be positive");
  const int steps = static_cast<int>(std::llround(t_f / dt));
  if (steps < 1 || std::abs(steps * dt - t_f) > 1e-12 * std::max(1.0, t_f)) {
    throw ValidationError("SimulationConfig: dt must divide t_f");
  }
  return steps;
}

std::pair<Vector, Vector> nash_controls(const Vector& x_a, const Vector& x_d,
                                        const EstimatorState& estimates,
                                        const RiccatiPath& riccati,
                                        const TruncatedBlocks& blocks, double t) {
  return controls_from(riccati.k11_at(t), riccati.s_at(t), blocks, x_a, estimates.x_hat_1d,
                       estimates.x_hat_2a, x_d);
}

SimulationTrace simulate_trial(const GameSystem& system, const SimulationConfig& config,
                               int trial_index) {
  if (trial_index < 0) throw ValidationError("simulate_trial: trial index must be nonnegative");
  const SimPrep prep = prepare(system, config);
  SimulationTrace trace;
  run_trial(system, config, prep, trial_index, &trace);
  return trace;
}

std::vector<TrialStats> run_trials_serial(const GameSystem& system,
                                          const SimulationConfig& config) {
  if (config.trials < 0) throw ValidationError("run_trials: negative trial count");
  const SimPrep prep = prepare(system, config);
  std::vector<TrialStats> stats(config.trials);
  for (int trial = 0; trial < config.trials; ++trial) {
    stats[trial] = run_trial(system, config, prep, trial, nullptr);
  }
  return stats;
}

std::vector<TrialStats> run_trials_parallel(const GameSystem& system,
                                            const SimulationConfig& config) {
  if (config.trials < 0) throw ValidationError("run_trials: negative trial count");
  const SimPrep prep = prepare(system, config);
  std::vector<TrialStats> stats(config.trials);
  const int threads = resolve_threads(config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (int trial = 0; trial < config.trials; ++trial) {
    stats[trial] = run_trial(system, config, prep, trial, nullptr);
  }
  (void)threads;
  return stats;
}

MonteCarloResult monte_carlo_cost(const GameSystem& system, const SimulationConfig& config) {
  if (config.trials < 2) throw ValidationError("monte_carlo_cost: need at least two trials");
  const std::vector<TrialStats> stats = config.threads == 1 ? run_trials_serial(system, config)
                                                            : run_trials_parallel(system, config);

  MonteCarloResult out;
  out.trials = config.trials;
  double sum = 0.0, sum_mis_a = 0.0, sum_mis_d = 0.0;
  for (const TrialStats& s : stats) {
    sum += s.cost;
    sum_mis_a += s.mismatch_a;
    sum_mis_d += s.mismatch_d;
  }
  out.mean = sum / config.trials;
  out.mismatch_a_mean = sum_mis_a / config.trials;
  out.mismatch_d_mean = sum_mis_d / config.trials;

  double sq = 0.0;
  for (const TrialStats& s : stats) sq += (s.cost - out.mean) * (s.cost - out.mean);
  out.std_error = std::sqrt(sq / (config.trials - 1) / config.trials);

  out.obs_term =
      system.params.obs_cost * (config.schedule_a.count() - config.schedule_d.count());
  if (system.riccati.has_full()) {
    out.trace_term = trace_noise_term(system.riccati,
                                      system.aggregate.c * system.aggregate.c.transpose());
    Vector x0(3 * system.params.n);
    x0 << system.params.x_a0, system.params.x_d0, system.asset.value_at(0.0);
    out.initial_term = x0.dot(system.riccati.k_full.front() * x0);
  }
  out.constants_estimate = out.mean - (out.mismatch_a_mean - out.mismatch_d_mean + out.obs_term);
  return out;
}

AnalyticCost analytic_total_cost(const GameSystem& system, const ObservationSchedule& schedule_a,
                                 const ObservationSchedule& schedule_d, const CovariancePath& cov,
                                 const MatrixPath& phi_a, const MatrixPath& phi_d) {
  AnalyticCost out;
  out.f_a = tilde_cost(schedule_a, cov, phi_a, 0.0).f;
  out.f_d = tilde_cost(schedule_d, cov, phi_d, 0.0).f;
  out.obs_term = system.params.obs_cost * (schedule_a.count() - schedule_d.count());
  out.schedule_terms = out.f_a - out.f_d + out.obs_term;
  if (system.riccati.has_full()) {
    out.trace_term = trace_noise_term(system.riccati,
                                      system.aggregate.c * system.aggregate.c.transpose());
    Vector x0(3 * system.params.n);
    x0 << system.params.x_a0, system.params.x_d0, system.asset.value_at(0.0);
    out.initial_term = x0.dot(system.riccati.k_full.front() * x0);
    out.total = out.schedule_terms + *out.trace_term + *out.initial_term;
  }
  return out;
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  const int n = trace.x_a.empty() ? 0 : static_cast<int>(trace.x_a.front().size());
  std::vector<std::string> header{"t"};
  auto add_block = [&](const char* prefix) {
    for (int i = 0; i < n; ++i) header.push_back(std::string(prefix) + "_" + std::to_string(i));
  };
  add_block("x_a");
  add_block("x_d");
  add_block("x_s");
  add_block("xhat_1d");
  add_block("xhat_2a");
  for (int i = 0; i < static_cast<int>(trace.u_a.front().size()); ++i) {
    header.push_back("u_a_" + std::to_string(i));
  }
  for (int i = 0; i < static_cast<int>(trace.u_d.front().size()); ++i) {
    header.push_back("u_d_" + std::to_string(i));
  }
  header.push_back("obs_a");
  header.push_back("obs_d");
  csv::write_row(out, header);

  auto marked = [](const std::vector<int>& steps, int k) {
    return std::binary_search(steps.begin(), steps.end(), k) ? 1.0 : 0.0;
  };
  std::vector<double> row;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    row.clear();
    row.push_back(trace.t[k]);
    for (const auto* block : {&trace.x_a, &trace.x_d, &trace.x_s, &trace.x_hat_1d,
                              &trace.x_hat_2a, &trace.u_a, &trace.u_d}) {
      const Vector& v = (*block)[k];
      for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
    }
    row.push_back(marked(trace.obs_steps_a, static_cast<int>(k)));
    row.push_back(marked(trace.obs_steps_d, static_cast<int>(k)));
    csv::write_row(out, row);
  }
}

}  // namespace dadg
