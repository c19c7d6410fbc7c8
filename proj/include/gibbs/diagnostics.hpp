#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gibbs/models.hpp"
#include "gibbs/torus.hpp"

namespace gibbs {

/// Points whose closed periodic rho-ball, themselves included, holds >= b points.
struct DenseReport {
  double radius = 0.0;
  std::size_t threshold = 0;
  std::vector<std::size_t> dense_ids;
  std::vector<bool> is_dense;
  std::size_t count = 0;
};

DenseReport count_b_dense(const Configuration& omega, double rho, std::size_t b);

/// Points with at least one other point at torus distance <= R.
struct HcViolationReport {
  double radius = 0.0;
  std::vector<std::size_t> violating_ids;
  std::size_t count = 0;
};

HcViolationReport hc_violations(const Configuration& omega, double R);

struct RConstants {
  double lambda = 1.0;
  int dim = 2;
  double r = 0.0;
  std::uint64_t n_r = 0;
  std::uint64_t K_r = 0;
  double A_r = 0.0;
  /// True when a caller raised n_r or K_r above the minimal values.
  bool overridden = false;
};

/// Minimal n_r > lambda (18 r)^d and K_r > (6r / (lambda^{-1/d} - 12 r n_r^{-1/d}))^d,
/// optionally raised by the caller, and A_r from them.
RConstants derive_r_constants(double lambda, int d, double r, std::optional<std::uint64_t> n_r_at_least = {},
                              std::optional<std::uint64_t> K_r_at_least = {});

/// Interior 6r-cubes on the grid 6r Z^d holding at most K_r - 1 points.
struct SparseCubeSet {
  double r = 0.0;
  std::vector<Point> centers;
  std::size_t s_n = 0;
  /// All grid cubes fully inside the window (the d_n of the counting argument).
  std::size_t interior_cubes = 0;
  /// Points lying in some interior cube.
  std::size_t points_in_interior = 0;
  /// Grid cells per axis are k in [-half_range, half_range]; `slot` maps a
  /// row-major cell to its index in `centers` or -1.
  std::int64_t half_range = -1;
  int dim = 2;
  std::vector<std::int64_t> slot;
};

SparseCubeSet sparse_cubes(const Configuration& omega, const RConstants& consts);

/// Index of the sparse cube whose Q_r(z) contains x, if any.
std::optional<std::size_t> sparse_cube_of(const SparseCubeSet& cubes, std::span<const double> x);

/// Lower bound log[(1-eps)^n eps^N (lambda r^d (s_n - N) / n)^N].
double event_E_probability_bound(std::size_t N, std::size_t s_n, double eps, std::size_t n, double r, double lambda,
                                 int d = 2);
/// Exact log P(E | base) = log[(1-eps)^{n-N} eps^N prod_{j<N} (s_n - j) r^d lambda / n].
double event_E_log_probability(std::size_t N, std::size_t s_n, double eps, std::size_t n, double r, double lambda,
                               int d = 2);

struct TrajectoryCheck {
  std::size_t N_r = 0;
  std::size_t N_2r = 0;
  /// Clause for bounded h: |sum h(B) - h(B_eps)| <= 2 c (K_r + 1) N^{2r}.
  bool bounded_applicable = false;
  double bounded_lhs = 0.0;
  double bounded_rhs = 0.0;
  bool bounded_pass = true;
  /// Clause for increasing cardinality-bounded h: sum h^{M_b}(B) - h^{M_b}(B_eps) >= -M_{K_r} K_r N^r.
  bool truncated_applicable = false;
  double truncated_lhs = 0.0;
  double truncated_rhs = 0.0;
  bool truncated_pass = true;

  bool pass() const { return bounded_pass && truncated_pass; }
  double slack() const;
};

struct ResampleCoupling;

TrajectoryCheck trajectory_bound_check(const ResampleCoupling& c, const ScoreModel& h, const RConstants& consts,
                                       std::size_t b);
TrajectoryCheck trajectory_bound_check(const ResampleCoupling& c, const InteractionModel& h, const RConstants& consts,
                                       std::size_t b);

/// exp(-(k/2) log(k / (n p))), valid for k >= e^2 n p.
double binomial_tail_bound(std::uint64_t n_trials, double p, double k);
/// Its logarithm, which stays finite where the bound underflows.
double binomial_tail_log_bound(std::uint64_t n_trials, double p, double k);

/// a_{r,eps} = 1.5 r^d v_d lambda eps (1 + eps/2).
double a_r_eps(double r, double eps, double lambda, int d);
/// p_eps = eps lambda r^d v_d.
double p_eps(double r, double eps, double lambda, int d);

/// Points of the r-boundary: some coordinate with |x_i| > w/2 - r.
std::size_t boundary_count(const Configuration& omega, double r);
/// p_n = 1 - (1 - 2 r (lambda/n)^{1/d})^d.
double boundary_fraction(std::size_t n, double lambda, int d, double r);

struct StirlingValue {
  double log_prob = 0.0;
  double normalized = 0.0;
};

/// log P(Poisson(n) = n) and (lambda/n) times it.
StirlingValue stirling_log_prob(std::uint64_t n, double lambda = 1.0);

}  // namespace gibbs
