#include "dadg/schedule.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dadg/csv.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dadg {

namespace {

double trace_product(const Matrix& lhs, const Matrix& rhs) {
  // Both arguments symmetric.
  return lhs.cwiseProduct(rhs).sum();
}

int panel_count(double length, double quad_step) {
  if (length <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(length / quad_step - 1e-9)));
}

// Splits [lo, hi] at the interior nodes of the phi grid and visits the pieces
// in order: seg(left_time, right_time, full_cell). Keeping Simpson panels
// clear of the interpolation kinks makes every quadrature below a smooth
// function of the interval endpoints, which the stationarity/finite-difference
// consistency checks rely on. full_cell marks pieces spanning one whole grid
// cell, for which callers may reuse cached step operators.
template <typename Seg>
void walk_segments(const TimeGrid& grid, double lo, double hi, Seg&& seg) {
  if (hi <= lo) return;
  const double snap = 1e-9 * grid.t_f;
  const double h = grid.dt();
  int j = static_cast<int>(std::floor(lo / h)) + 1;
  if (j < 1) j = 1;
  while (j <= grid.intervals && grid.node(j) <= lo + snap) ++j;
  double u = lo;
  while (j <= grid.intervals && grid.node(j) < hi - snap) {
    seg(u, grid.node(j), u != lo);
    u = grid.node(j);
    ++j;
  }
  seg(u, hi, false);
}

// int_{t0}^{t1} Tr[Sigma(t - t0) phi(t)] dt with Sigma advanced by the exact
// one-step recurrence and a Simpson panel per grid-aligned segment.
double interval_mismatch(const Matrix& a, const Matrix& c, double t0, double t1,
                         const MatrixPath& phi) {
  if (t1 - t0 <= 0.0) return 0.0;
  const LyapunovStep cell_half = lyapunov_discretize(a, c, 0.5 * phi.grid.dt());

  Matrix sigma = Matrix::Zero(a.rows(), a.cols());
  double g_left = 0.0;  // Sigma(0) = 0
  double acc = 0.0;
  walk_segments(phi.grid, t0, t1, [&](double u, double v, bool full_cell) {
    const double len = v - u;
    if (len <= 0.0) return;
    const LyapunovStep& half = full_cell ? cell_half : lyapunov_discretize(a, c, 0.5 * len);
    sigma = symmetrized(half.transition * sigma * half.transition.transpose() + half.increment);
    const double g_mid = trace_product(sigma, phi.at(0.5 * (u + v)));
    sigma = symmetrized(half.transition * sigma * half.transition.transpose() + half.increment);
    const double g_right = trace_product(sigma, phi.at(v));
    acc += (len / 6.0) * (g_left + 4.0 * g_mid + g_right);
    g_left = g_right;
  });
  return acc;
}

Vector vec_of(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace

const char* player_name(Player p) { return p == Player::attacker ? "attacker" : "defender"; }

ObservationSchedule ObservationSchedule::of(Player p, std::vector<double> instants, double t_f) {
  ObservationSchedule out{p, std::move(instants)};
  out.validate(t_f);
  return out;
}

void ObservationSchedule::validate(double t_f) const {
  double prev = 0.0;
  for (double t : instants) {
    if (!(t > 0.0) || !(t < t_f)) {
      throw ValidationError("ObservationSchedule: instants must lie strictly inside (0, t_f)");
    }
    if (t <= prev) throw ValidationError("ObservationSchedule: instants must be strictly increasing");
    prev = t;
  }
}

ObservationSchedule periodic_schedule(Player player, int count, double t_f) {
  if (count < 0) throw ValidationError("periodic_schedule: count must be nonnegative");
  std::vector<double> instants(count);
  for (int i = 1; i <= count; ++i) instants[i - 1] = t_f * i / (count + 1);
  return ObservationSchedule{player, std::move(instants)};
}

Matrix MatrixPath::at(double t) const {
  const auto loc = grid.locate(t);
  if (loc.weight == 0.0) return samples[loc.lower];
  return (1.0 - loc.weight) * samples[loc.lower] + loc.weight * samples[loc.lower + 1];
}

MatrixPath phi_path(const RiccatiPath& riccati, Player player) {
  if (!riccati.has_phi()) throw ValidationError("phi_path: weighting paths not built");
  return MatrixPath{riccati.grid, player == Player::attacker ? riccati.phi_a : riccati.phi_d};
}

ScheduleCost tilde_cost(const ObservationSchedule& schedule, const CovariancePath& cov,
                        const MatrixPath& phi, double obs_cost) {
  const Matrix& a = schedule.player == Player::attacker ? cov.a_d : cov.a_a;
  const Matrix& c = schedule.player == Player::attacker ? cov.c_d : cov.c_a;
  ScheduleOptimizer optimizer(schedule.player, a, c, phi);
  return optimizer.cost(schedule, obs_cost);
}

double lhs_integral(double t_prev, double t_i, const Matrix& a, const Matrix& c,
                    const Matrix& phi_at_ti, double quad_step) {
  if (t_prev > t_i) throw ValidationError("lhs_integral: reversed arguments");
  const double length = t_i - t_prev;
  if (length <= 0.0) return 0.0;
  const int panels = panel_count(length, quad_step);
  const double delta = length / panels;
  const Matrix half_step = (a * (0.5 * delta)).exp();

  Matrix w = c;  // e^{A xi} C at the current half node
  double g_left = trace_product(w * w.transpose(), phi_at_ti);
  double acc = 0.0;
  for (int panel = 0; panel < panels; ++panel) {
    w = half_step * w;
    const double g_mid = trace_product(w * w.transpose(), phi_at_ti);
    w = half_step * w;
    const double g_right = trace_product(w * w.transpose(), phi_at_ti);
    acc += (delta / 6.0) * (g_left + 4.0 * g_mid + g_right);
    g_left = g_right;
  }
  return acc;
}

double rhs_integral(double t_i, double t_end, const Matrix& a, const Matrix& c,
                    const MatrixPath& phi) {
  if (t_i > t_end) throw ValidationError("rhs_integral: reversed arguments");
  if (t_end - t_i <= 0.0) return 0.0;
  const Matrix cell_half = (a * (0.5 * phi.grid.dt())).exp();

  Matrix w = c;  // e^{A (t - t_i)} C at the running segment boundary
  double g_left = trace_product(w * w.transpose(), phi.at(t_i));
  double acc = 0.0;
  walk_segments(phi.grid, t_i, t_end, [&](double u, double v, bool full_cell) {
    const double len = v - u;
    if (len <= 0.0) return;
    const Matrix half = full_cell ? cell_half : (a * (0.5 * len)).exp();
    w = half * w;
    const double g_mid = trace_product(w * w.transpose(), phi.at(0.5 * (u + v)));
    w = half * w;
    const double g_right = trace_product(w * w.transpose(), phi.at(v));
    acc += (len / 6.0) * (g_left + 4.0 * g_mid + g_right);
    g_left = g_right;
  });
  return acc;
}

ScheduleOptimizer::ScheduleOptimizer(Player player, Matrix opponent_drift, Matrix opponent_noise,
                                     MatrixPath phi)
    : player_(player),
      drift_(std::move(opponent_drift)),
      noise_(std::move(opponent_noise)),
      phi_(std::move(phi)) {
  if (drift_.rows() != drift_.cols() || noise_.rows() != drift_.rows()) {
    throw ValidationError("ScheduleOptimizer: drift/noise dimension mismatch");
  }
  if (phi_.samples.empty() || phi_.samples.front().rows() != drift_.rows()) {
    throw ValidationError("ScheduleOptimizer: phi path dimension mismatch");
  }
  quad_step_ = phi_.grid.dt();
  root_tol_ = 1e-9 * phi_.grid.t_f;
}

ScheduleOptimizer ScheduleOptimizer::for_player(Player player, const GameParameters& params,
                                                const RiccatiPath& riccati) {
  params.validate();
  if (player == Player::attacker) {
    return ScheduleOptimizer(player, params.a_d, params.c_d, phi_path(riccati, Player::attacker));
  }
  return ScheduleOptimizer(player, params.a_a, params.c_a, phi_path(riccati, Player::defender));
}

double ScheduleOptimizer::lhs(double t_prev, double t_i) const {
  return lhs_integral(t_prev, t_i, drift_, noise_, phi_.at(t_i), quad_step_);
}

double ScheduleOptimizer::rhs(double t_i, double t_end) const {
  return rhs_integral(t_i, t_end, drift_, noise_, phi_);
}

ScheduleCost ScheduleOptimizer::cost(const ObservationSchedule& schedule, double obs_cost) const {
  if (schedule.player != player_) throw ValidationError("cost: schedule belongs to the other player");
  if (obs_cost < 0.0) throw ValidationError("cost: observation price must be nonnegative");
  schedule.validate(horizon());

  ScheduleCost out;
  double left = 0.0;
  for (int i = 0; i <= schedule.count(); ++i) {
    const double right = i < schedule.count() ? schedule.instants[i] : horizon();
    out.per_interval.push_back(interval_mismatch(drift_, noise_, left, right, phi_));
    out.f += out.per_interval.back();
    left = right;
  }
  out.total = out.f + obs_cost * schedule.count();
  return out;
}

// Marches the post-observation mass R(tau) = rhs(t_i, tau) across [t_i, t_f]
// once, accumulating panel-wise Simpson sums, and locates the smallest root of
// R = target inside the bracketing panel by bisection. total is R(t_f); root
// is empty when total < target.
ScheduleOptimizer::MassScan ScheduleOptimizer::scan_mass(double t_i, double target,
                                                         double tol) const {
  MassScan out;
  const double t_f = horizon();
  const double length = t_f - t_i;
  if (length <= 0.0) {
    out.total = 0.0;
    if (target <= 0.0) out.root = t_i;
    return out;
  }
  if (target <= 0.0) {
    out.total = rhs(t_i, t_f);
    out.root = t_i;
    return out;
  }

  const Matrix cell_half = (drift_ * (0.5 * phi_.grid.dt())).exp();

  Matrix w_run = noise_;  // e^{A (t - t_i)} C at the running segment boundary
  double g_run = trace_product(w_run * w_run.transpose(), phi_.at(t_i));
  double acc = 0.0;
  bool found = false;
  double seg_start = t_i, seg_len = 0.0, acc_start = 0.0, g_start = 0.0;
  Matrix w_start = noise_;

  walk_segments(phi_.grid, t_i, t_f, [&](double u, double v, bool full_cell) {
    const double len = v - u;
    if (len <= 0.0) return;
    const Matrix half = full_cell ? cell_half : (drift_ * (0.5 * len)).exp();
    const Matrix w_mid = half * w_run;
    const double g_mid = trace_product(w_mid * w_mid.transpose(), phi_.at(0.5 * (u + v)));
    const Matrix w_right = half * w_mid;
    const double g_right = trace_product(w_right * w_right.transpose(), phi_.at(v));
    const double next_acc = acc + (len / 6.0) * (g_run + 4.0 * g_mid + g_right);
    if (!found && next_acc >= target) {
      found = true;
      seg_start = u;
      seg_len = len;
      acc_start = acc;
      g_start = g_run;
      w_start = w_run;
    }
    acc = next_acc;
    w_run = w_right;
    g_run = g_right;
  });
  out.total = acc;
  if (!found) return out;  // total < target

  // Refine inside the bracketing segment: R(seg_start + w) = acc_start plus
  // the three-point Simpson over [seg_start, seg_start + w] with exact
  // integrand values.
  auto partial = [&](double w) -> double {
    if (w <= 0.0) return 0.0;
    const Matrix e_half = (drift_ * (0.5 * w)).exp();
    const Matrix w_mid = e_half * w_start;
    const Matrix w_end = e_half * w_mid;
    const double g_mid = trace_product(w_mid * w_mid.transpose(), phi_.at(seg_start + 0.5 * w));
    const double g_end = trace_product(w_end * w_end.transpose(), phi_.at(seg_start + w));
    return (w / 6.0) * (g_start + 4.0 * g_mid + g_end);
  };

  double lo = 0.0, hi = seg_len;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (acc_start + partial(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.root = seg_start + 0.5 * (lo + hi);
  return out;
}

std::optional<double> ScheduleOptimizer::next_instance(double t_prev, double t_i,
                                                       double tol) const {
  if (t_prev < 0.0 || t_prev > t_i || t_i > horizon()) {
    throw ValidationError("next_instance: need 0 <= t_prev <= t_i <= t_f");
  }
  if (!(tol > 0.0)) throw ValidationError("next_instance: tol must be positive");
  const double target = lhs(t_prev, t_i);
  if (target <= 0.0) return t_i;
  return scan_mass(t_i, target, tol).root;
}

BinarySearchResult ScheduleOptimizer::binary_search_schedule(int count, double eps) const {
  if (count < 1) throw ValidationError("binary_search_schedule: count must be >= 1");
  if (!(eps > 0.0)) throw ValidationError("binary_search_schedule: eps must be positive");
  if (rhs(0.0, horizon()) <= 0.0) {
    throw ValidationError("binary_search_schedule: no interior optimum, weighting path has no mass");
  }

  const double t_f = horizon();
  double t_low = 0.0;
  double t_up = t_f;
  double t1 = 0.5 * (t_low + t_up);
  int iterations = 0;
  std::vector<double> chain(count + 2, 0.0);

  while (t_up - t_low > eps) {
    ++iterations;
    chain[0] = 0.0;
    chain[1] = t1;
    for (int i = 1; i <= count; ++i) {
      const double val = lhs(chain[i - 1], chain[i]);
      const MassScan scan = scan_mass(chain[i], val, root_tol_);
      if (!scan.root) {
        // Guess too large: the chain cannot absorb the accumulated mass.
        t_up = t1;
        t1 = 0.5 * (t_low + t1);
        break;
      }
      chain[i + 1] = *scan.root;
      if (i == count) {
        if (chain[i + 1] < t_f - root_tol_) {
          // Mass left over past the last instant: guess too small.
          t_low = t1;
          t1 = 0.5 * (t_up + t1);
        } else {
          t_low = t_up = t1;
        }
      }
    }
  }

  t1 = 0.5 * (t_low + t_up);
  auto chain_from = [&](double first) -> std::optional<std::vector<double>> {
    std::vector<double> t(count + 1);
    t[0] = 0.0;
    t[1] = first;
    for (int i = 1; i < count; ++i) {
      const auto next = next_instance(t[i - 1], t[i], root_tol_);
      if (!next) return std::nullopt;
      t[i + 1] = *next;
    }
    return std::vector<double>(t.begin() + 1, t.end());
  };

  auto instants = chain_from(t1);
  if (!instants && t_low > 0.0 && t_low < t1) instants = chain_from(t_low);
  if (!instants) {
    throw NumericalError("binary_search_schedule: chain infeasible at the bisection limit");
  }
  return BinarySearchResult{ObservationSchedule::of(player_, std::move(*instants), t_f),
                            iterations};
}

std::vector<double> ScheduleOptimizer::residuals(const ObservationSchedule& schedule) const {
  schedule.validate(horizon());
  std::vector<double> out(schedule.count());
  for (int i = 0; i < schedule.count(); ++i) {
    const double prev = i == 0 ? 0.0 : schedule.instants[i - 1];
    const double next = i + 1 < schedule.count() ? schedule.instants[i + 1] : horizon();
    out[i] = lhs(prev, schedule.instants[i]) - rhs(schedule.instants[i], next);
  }
  return out;
}

CountSearchResult ScheduleOptimizer::optimal_observation_count(double obs_cost,
                                                               std::optional<int> cap,
                                                               double eps) const {
  if (obs_cost < 0.0) throw ValidationError("optimal_observation_count: negative price");
  if (obs_cost == 0.0 && !cap) {
    throw ValidationError("optimal_observation_count: zero price needs an explicit cap");
  }
  if (eps <= 0.0) eps = 1e-6 * horizon();

  CountSearchResult best{0, ObservationSchedule::empty(player_),
                         cost(ObservationSchedule::empty(player_), obs_cost)};
  // N* lies strictly below f*(0)/O and weakly below N + f*(N)/O for every
  // evaluated N.
  double strict_bound = obs_cost > 0.0 ? best.cost.f / obs_cost
                                       : std::numeric_limits<double>::infinity();
  double refine_bound = std::numeric_limits<double>::infinity();
  const int max_n = cap.value_or(std::numeric_limits<int>::max());

  for (int n = 1; n <= max_n && n < strict_bound && n <= refine_bound; ++n) {
    const BinarySearchResult search = binary_search_schedule(n, eps);
    const ScheduleCost c = cost(search.schedule, obs_cost);
    if (c.total < best.cost.total) best = CountSearchResult{n, search.schedule, c};
    if (obs_cost > 0.0) refine_bound = std::min(refine_bound, n + c.f / obs_cost);
  }
  return best;
}

BruteForceResult ScheduleOptimizer::brute_force_schedule(int count, double grid_step) const {
  if (count != 1 && count != 2) {
    throw ValidationError("brute_force_schedule: only one or two instants supported");
  }
  const double t_f = horizon();
  if (!(grid_step > 0.0) || grid_step >= t_f) {
    throw ValidationError("brute_force_schedule: bad grid step");
  }

  const int cells = std::max(2, static_cast<int>(std::llround(t_f / grid_step)));
  const int n = static_cast<int>(drift_.rows());
  const int nn = n * n;

  // Interval costs in O(1) per pair through cumulative Kronecker integrals:
  //   Tr[Sigma(t-a) phi(t)] = P(t)' e^{-Ga} (V(t) - V(a)),
  // G = A (+) A, V = (int_0^t e^{Gs} ds) vec(CC'), P = vec(phi).
  const Matrix id = Matrix::Identity(n, n);
  const Matrix gmat = Eigen::kroneckerProduct(drift_, id) + Eigen::kroneckerProduct(id, drift_);
  const Vector c0 = vec_of(noise_ * noise_.transpose());

  const double cell = t_f / cells;
  const int sub = std::max(1, static_cast<int>(std::ceil(cell / phi_.grid.dt() - 1e-9)));
  const double delta = cell / sub;

  Matrix block = Matrix::Zero(2 * nn, 2 * nn);
  block.topLeftCorner(nn, nn) = gmat;
  block.topRightCorner(nn, nn) = Matrix::Identity(nn, nn);
  const Matrix block_exp = (block * (0.5 * delta)).exp();
  const Matrix e_half = block_exp.topLeftCorner(nn, nn);   // e^{G delta/2}
  const Matrix j_half = block_exp.topRightCorner(nn, nn);  // int_0^{delta/2} e^{Gs} ds

  std::vector<Matrix> h_nodes(cells + 1);
  std::vector<Vector> w_nodes(cells + 1), v_nodes(cells + 1);

  Matrix e_cur = Matrix::Identity(nn, nn);
  Matrix mtil = Matrix::Zero(nn, nn);
  Matrix h_run = Matrix::Zero(nn, nn);
  Vector w_run = Vector::Zero(nn);
  h_nodes[0] = h_run;
  w_nodes[0] = w_run;
  v_nodes[0] = Vector::Zero(nn);

  Vector v_left = v_nodes[0];
  Vector p_left = vec_of(phi_.at(0.0));
  double t_run = 0.0;
  for (int k = 0; k < cells; ++k) {
    for (int s = 0; s < sub; ++s) {
      mtil += e_cur * j_half;
      e_cur = e_cur * e_half;
      const Vector v_mid = mtil * c0;
      const Vector p_mid = vec_of(phi_.at(t_run + 0.5 * delta));
      mtil += e_cur * j_half;
      e_cur = e_cur * e_half;
      const Vector v_right = mtil * c0;
      const Vector p_right = vec_of(phi_.at(t_run + delta));

      h_run += (delta / 6.0) *
               (v_left * p_left.transpose() + 4.0 * v_mid * p_mid.transpose() +
                v_right * p_right.transpose());
      w_run += (delta / 6.0) * (p_left + 4.0 * p_mid + p_right);
      v_left = v_right;
      p_left = p_right;
      t_run += delta;
    }
    h_nodes[k + 1] = h_run;
    w_nodes[k + 1] = w_run;
    v_nodes[k + 1] = v_left;
  }

  const Matrix e_minus_cell = (gmat * (-cell)).exp();
  std::vector<Matrix> e_minus_t(cells + 1);  // transposed e^{-G g_k}
  std::vector<Vector> ev(cells + 1);
  Matrix e_minus = Matrix::Identity(nn, nn);
  for (int k = 0; k <= cells; ++k) {
    e_minus_t[k] = e_minus.transpose();
    ev[k] = e_minus * v_nodes[k];
    if (k < cells) e_minus = e_minus * e_minus_cell;
  }

  auto interval = [&](int k, int l) -> double {
    return e_minus_t[k].cwiseProduct(h_nodes[l] - h_nodes[k]).sum() -
           (w_nodes[l] - w_nodes[k]).dot(ev[k]);
  };

  std::vector<double> head(cells + 1), tail(cells + 1);
  for (int k = 0; k <= cells; ++k) {
    head[k] = h_nodes[k].trace();  // interval(0, k)
    tail[k] = interval(k, cells);
  }

  double best_f = std::numeric_limits<double>::infinity();
  int best_k = -1, best_l = -1;
  if (count == 1) {
    for (int k = 1; k < cells; ++k) {
      const double f = head[k] + tail[k];
      if (f < best_f) {
        best_f = f;
        best_k = k;
      }
    }
  } else {
    struct Best {
      double f = std::numeric_limits<double>::infinity();
      int k = -1, l = -1;
    };
    std::vector<Best> per_thread;
#ifdef _OPENMP
    per_thread.resize(omp_get_max_threads());
#else
    per_thread.resize(1);
#endif
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int k = 1; k < cells - 1; ++k) {
#ifdef _OPENMP
      Best& mine = per_thread[omp_get_thread_num()];
#else
      Best& mine = per_thread[0];
#endif
      for (int l = k + 1; l < cells; ++l) {
        const double f = head[k] + interval(k, l) + tail[l];
        if (f < mine.f || (f == mine.f && (k < mine.k || (k == mine.k && l < mine.l)))) {
          mine = Best{f, k, l};
        }
      }
    }
    for (const Best& b : per_thread) {
      if (b.k < 0) continue;
      if (b.f < best_f || (b.f == best_f && (b.k < best_k || (b.k == best_k && b.l < best_l)))) {
        best_f = b.f;
        best_k = b.k;
        best_l = b.l;
      }
    }
  }

  std::vector<double> instants;
  instants.push_back(t_f * best_k / cells);
  if (count == 2) instants.push_back(t_f * best_l / cells);
  return BruteForceResult{ObservationSchedule::of(player_, std::move(instants), t_f), best_f};
}

void write_schedules_csv(const std::vector<ObservationSchedule>& schedules, std::ostream& out) {
  csv::write_row(out, std::vector<std::string>{"player", "index", "instant"});
  for (const ObservationSchedule& schedule : schedules) {
    for (int i = 0; i < schedule.count(); ++i) {
      out << player_name(schedule.player) << ',' << i + 1 << ',' << csv::format(schedule.instants[i])
          << '\n';
    }
  }
}

std::vector<ObservationSchedule> read_schedules_csv(std::istream& in, double t_f) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("player,index,instant", 0) != 0) {
    throw ValidationError("schedule CSV: missing header");
  }
  std::vector<double> attacker, defender;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string who, index, instant;
    if (!std::getline(row, who, ',') || !std::getline(row, index, ',') ||
        !std::getline(row, instant, ',')) {
      throw ValidationError("schedule CSV: malformed row: " + line);
    }
    double value = 0.0;
    try {
      value = std::stod(instant);
    } catch (const std::exception&) {
      throw ValidationError("schedule CSV: bad instant: " + line);
    }
    if (who == "attacker") {
      attacker.push_back(value);
    } else if (who == "defender") {
      defender.push_back(value);
    } else {
      throw ValidationError("schedule CSV: unknown player: " + who);
    }
  }
  std::vector<ObservationSchedule> out;
  out.push_back(ObservationSchedule::of(Player::attacker, std::move(attacker), t_f));
  out.push_back(ObservationSchedule::of(Player::defender, std::move(defender), t_f));
  return out;
}

}  // namespace dadg
