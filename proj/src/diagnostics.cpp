#include "gibbs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gibbs/cell_index.hpp"
#include "gibbs/couplings.hpp"
#include "gibbs/error.hpp"
#include "gibbs/hamiltonian.hpp"
#include "gibbs/numeric.hpp"

namespace gibbs {

DenseReport count_b_dense(const Configuration& omega, double rho, std::size_t b) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "density radius must be positive");
  check_local_radius(omega.window(), rho);
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), rho);
  DenseReport out;
  out.radius = rho;
  out.threshold = b;
  out.is_dense.assign(omega.size(), false);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    std::size_t hits = 0;
    index.visit_ball(omega.point(i), rho, [&hits](std::size_t, std::span<const double>, double) { ++hits; });
    if (hits >= b) {
      out.is_dense[i] = true;
      out.dense_ids.push_back(i);
    }
  }
  out.count = out.dense_ids.size();
  return out;
}

HcViolationReport hc_violations(const Configuration& omega, double R) {
  const DenseReport dense = count_b_dense(omega, R, 2);
  return {R, dense.dense_ids, dense.count};
}

RConstants derive_r_constants(double lambda, int d, double r, std::optional<std::uint64_t> n_r_at_least,
                              std::optional<std::uint64_t> K_r_at_least) {
  if (!(lambda > 0.0) || !(r > 0.0) || d < 1) {
    throw Error(ErrorCode::InvalidArgument, "constants need lambda > 0, r > 0, d >= 1");
  }
  RConstants c;
  c.lambda = lambda;
  c.dim = d;
  c.r = r;
  c.n_r = static_cast<std::uint64_t>(std::floor(lambda * std::pow(18.0 * r, d))) + 1;
  if (n_r_at_least && *n_r_at_least > c.n_r) {
    c.n_r = *n_r_at_least;
    c.overridden = true;
  }
  const double gap = std::pow(lambda, -1.0 / d) - 12.0 * r / std::pow(static_cast<double>(c.n_r), 1.0 / d);
  c.K_r = static_cast<std::uint64_t>(std::floor(std::pow(6.0 * r / gap, d))) + 1;
  if (K_r_at_least && *K_r_at_least > c.K_r) {
    c.K_r = *K_r_at_least;
    c.overridden = true;
  }
  c.A_r = std::pow(gap / (6.0 * r), d) - 1.0 / static_cast<double>(c.K_r);
  if (!(c.A_r > 0.0)) throw Error(ErrorCode::ConstraintViolated, "derived A_r is not positive");
  return c;
}

namespace {

// Grid cell (per axis) of a coordinate on 6r Z with half-open cells.
std::int64_t grid_cell(double x, double r) { return static_cast<std::int64_t>(std::floor((x + 3.0 * r) / (6.0 * r))); }

std::optional<std::size_t> cell_slot(const SparseCubeSet& s, std::span<const double> x) {
  if (s.half_range < 0) return std::nullopt;
  const std::int64_t span = 2 * s.half_range + 1;
  std::size_t linear = 0;
  for (std::size_t a = x.size(); a-- > 0;) {
    const std::int64_t k = grid_cell(x[a], s.r);
    if (k < -s.half_range || k > s.half_range) return std::nullopt;
    linear = linear * static_cast<std::size_t>(span) + static_cast<std::size_t>(k + s.half_range);
  }
  return linear;
}

}  // namespace

SparseCubeSet sparse_cubes(const Configuration& omega, const RConstants& consts) {
  const TorusWindow& w = omega.window();
  if (w.point_budget() < consts.n_r) {
    throw Error(ErrorCode::WindowTooSmall, "sparse cubes need n >= n_r (n = " + std::to_string(w.point_budget()) +
                                               ", n_r = " + std::to_string(consts.n_r) + ")");
  }
  SparseCubeSet out;
  out.r = consts.r;
  out.dim = w.dim();
  const double r = consts.r;
  out.half_range = w.side() >= 6.0 * r ? static_cast<std::int64_t>(std::floor((w.side() - 6.0 * r) / (12.0 * r))) : -1;
  // Guard against round-off in the floor: the outermost cube must fit.
  while (out.half_range >= 0 && 6.0 * r * static_cast<double>(out.half_range) + 3.0 * r > w.half_side()) --out.half_range;
  if (out.half_range < 0) return out;

  const std::int64_t span = 2 * out.half_range + 1;
  std::size_t cells = 1;
  for (int a = 0; a < w.dim(); ++a) cells *= static_cast<std::size_t>(span);
  out.interior_cubes = cells;
  std::vector<std::size_t> counts(cells, 0);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (auto s = cell_slot(out, omega.point(i))) {
      ++counts[*s];
      ++out.points_in_interior;
    }
  }
  out.slot.assign(cells, -1);
  for (std::size_t c = 0; c < cells; ++c) {
    if (counts[c] + 1 > consts.K_r) continue;
    Point z(static_cast<std::size_t>(w.dim()));
    std::size_t rest = c;
    for (auto& v : z) {
      v = 6.0 * r * static_cast<double>(static_cast<std::int64_t>(rest % static_cast<std::size_t>(span)) - out.half_range);
      rest /= static_cast<std::size_t>(span);
    }
    out.slot[c] = static_cast<std::int64_t>(out.centers.size());
    out.centers.push_back(std::move(z));
  }
  out.s_n = out.centers.size();
  return out;
}

std::optional<std::size_t> sparse_cube_of(const SparseCubeSet& cubes, std::span<const double> x) {
  const auto s = cell_slot(cubes, x);
  if (!s || cubes.slot[*s] < 0) return std::nullopt;
  const auto id = static_cast<std::size_t>(cubes.slot[*s]);
  const auto& z = cubes.centers[id];
  const double half = 0.5 * cubes.r;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double rel = x[a] - z[a];
    if (rel < -half || rel >= half) return std::nullopt;
  }
  return id;
}

double event_E_probability_bound(std::size_t N, std::size_t s_n, double eps, std::size_t n, double r, double lambda,
                                 int d) {
  if (N >= s_n) throw Error(ErrorCode::DensityExceedsCubes, "dense count must be below the sparse-cube count");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  const auto nd = static_cast<double>(n);
  const auto Nd = static_cast<double>(N);
  double out = nd * std::log1p(-eps);
  if (N > 0) {
    out += Nd * std::log(eps) + Nd * std::log(lambda * std::pow(r, d) * static_cast<double>(s_n - N) / nd);
  }
  return out;
}

double event_E_log_probability(std::size_t N, std::size_t s_n, double eps, std::size_t n, double r, double lambda,
                               int d) {
  if (N > s_n) return -HUGE_VAL;
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  const auto nd = static_cast<double>(n);
  NeumaierSum out;
  out += static_cast<double>(n - N) * std::log1p(-eps);
  out += static_cast<double>(N) * std::log(eps);
  const double cell = lambda * std::pow(r, d) / nd;
  for (std::size_t j = 0; j < N; ++j) out += std::log(static_cast<double>(s_n - j) * cell);
  return out.value();
}

double TrajectoryCheck::slack() const {
  double s = HUGE_VAL;
  if (bounded_applicable) s = std::min(s, bounded_rhs - bounded_lhs);
  if (truncated_applicable) s = std::min(s, truncated_lhs - truncated_rhs);
  return s;
}

namespace {

template <class Values>
TrajectoryCheck trajectory_check_impl(const ResampleCoupling& c, const RConstants& consts, std::size_t b,
                                      std::optional<double> bound, std::optional<double> M_b, std::optional<double> M_K,
                                      const Values& values) {
  if (b <= consts.K_r) throw Error(ErrorCode::PreconditionViolated, "trajectory bounds need b > K_r");
  const EventReport event = detect_event_E_move(c, b, consts.r, consts);
  if (!event.holds) throw Error(ErrorCode::EventNotSatisfied, "coupling is not on E (" + event.failed_clause() + ")");

  TrajectoryCheck out;
  out.N_r = count_b_dense(c.base, consts.r, b).count;
  out.N_2r = count_b_dense(c.base, 2.0 * consts.r, b).count;
  const Configuration partner = c.partner();
  const auto K = static_cast<double>(consts.K_r);

  if (bound) {
    const auto lhs = values(c.base, std::optional<double>{});
    const auto rhs = values(partner, std::optional<double>{});
    NeumaierSum diff;
    for (std::size_t i = 0; i < lhs.size(); ++i) diff += lhs[i] - rhs[i];
    out.bounded_applicable = true;
    out.bounded_lhs = std::abs(diff.value());
    out.bounded_rhs = 2.0 * *bound * (K + 1.0) * static_cast<double>(out.N_2r);
    out.bounded_pass = out.bounded_lhs <= out.bounded_rhs;
  }
  if (M_b && M_K) {
    const auto lhs = values(c.base, M_b);
    const auto rhs = values(partner, M_b);
    NeumaierSum diff;
    for (std::size_t i = 0; i < lhs.size(); ++i) diff += lhs[i] - rhs[i];
    out.truncated_applicable = true;
    out.truncated_lhs = diff.value();
    out.truncated_rhs = -*M_K * K * static_cast<double>(out.N_r);
    out.truncated_pass = out.truncated_lhs >= out.truncated_rhs;
  }
  return out;
}

}  // namespace

TrajectoryCheck trajectory_bound_check(const ResampleCoupling& c, const ScoreModel& h, const RConstants& consts,
                                       std::size_t b) {
  auto values = [&h](const Configuration& omega, std::optional<double> cap) {
    return score_values(cap ? h.capped(*cap) : h, omega);
  };
  const auto K = static_cast<std::size_t>(consts.K_r);
  return trajectory_check_impl(c, consts, b, h.bound(), h.cardinality_bound(b), h.cardinality_bound(K), values);
}

TrajectoryCheck trajectory_bound_check(const ResampleCoupling& c, const InteractionModel& h, const RConstants& consts,
                                       std::size_t b) {
  if (h.is_hard_core()) throw Error(ErrorCode::PreconditionViolated, "trajectory bounds need a finite h");
  auto values = [&h](const Configuration& omega, std::optional<double> cap) {
    const auto energies = local_energies(cap ? h.capped(*cap) : h, omega);
    std::vector<double> out;
    out.reserve(energies.size());
    for (const auto& e : energies) out.push_back(e.value + h.offset());
    return out;
  };
  const auto K = static_cast<std::size_t>(consts.K_r);
  return trajectory_check_impl(c, consts, b, h.bound(), h.cardinality_bound(b), h.cardinality_bound(K), values);
}

double binomial_tail_log_bound(std::uint64_t n_trials, double p, double k) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0,1]");
  const double mean = static_cast<double>(n_trials) * p;
  if (!(k >= std::exp(2.0) * mean)) throw Error(ErrorCode::OutOfRegime, "tail bound needs k >= e^2 n p");
  if (k <= 0.0) return 0.0;
  if (mean == 0.0) return -HUGE_VAL;
  return -0.5 * k * std::log(k / mean);
}

double binomial_tail_bound(std::uint64_t n_trials, double p, double k) {
  return std::exp(binomial_tail_log_bound(n_trials, p, k));
}

double a_r_eps(double r, double eps, double lambda, int d) {
  return 1.5 * std::pow(r, d) * unit_ball_volume(d) * lambda * eps * (1.0 + 0.5 * eps);
}

double p_eps(double r, double eps, double lambda, int d) { return eps * lambda * std::pow(r, d) * unit_ball_volume(d); }

std::size_t boundary_count(const Configuration& omega, double r) {
  check_local_radius(omega.window(), r);
  const double inner = omega.window().half_side() - r;
  std::size_t count = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const auto p = omega.point(i);
    if (std::any_of(p.begin(), p.end(), [inner](double x) { return std::abs(x) > inner; })) ++count;
  }
  return count;
}

double boundary_fraction(std::size_t n, double lambda, int d, double r) {
  const double inner = 1.0 - 2.0 * r * std::pow(lambda / static_cast<double>(n), 1.0 / d);
  return 1.0 - std::pow(inner, d);
}

StirlingValue stirling_log_prob(std::uint64_t n, double lambda) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const auto nd = static_cast<double>(n);
  const double lp = -nd + nd * std::log(nd) - std::lgamma(nd + 1.0);
  return {lp, lambda / nd * lp};
}

}  // namespace gibbs
