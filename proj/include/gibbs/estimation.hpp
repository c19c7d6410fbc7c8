#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/models.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/samplers.hpp"
#include "gibbs/torus.hpp"

namespace gibbs {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::string method;
};

/// Mean and standard error of the mean of per-replica values; the values are
/// sorted before summation so the result ignores replica order.
Estimate merge_replicas(std::vector<double> values, std::size_t n_samples, const std::string& method);

struct PartitionEstimate {
  /// log Z~_n against the binomial reference.
  Estimate log_z_tilde;
  /// (lambda/n) log Z~_n.
  Estimate normalized;
  /// log Z_n = log Z~_n + log P(Poisson(n) = n), and its normalized form.
  Estimate log_z;
  Estimate normalized_z;
  /// Naive: fraction of draws with finite energy.
  double nonzero_fraction = 1.0;
  /// TI: normalized value on the coarse sub-grid and |fine - coarse|.
  std::optional<double> coarse_normalized;
  double quadrature_error = 0.0;
  /// TI: largest lag-1 autocorrelation of the energy trace over nodes.
  double max_lag1_autocorrelation = 0.0;
};

constexpr std::size_t kDefaultReplicas = 16;

/// log of the mean of exp(-H) over i.i.d. binomial draws.
PartitionEstimate estimate_log_partition_naive(const InteractionModel& V, const HamiltonianSpec& spec,
                                               const TorusWindow& w, std::size_t samples, RngStream& rng,
                                               std::size_t replicas = kDefaultReplicas);

/// Chebyshev-Lobatto nodes (1 - cos(pi j / (m - 1))) / 2, j = 0..m-1.
std::vector<double> chebyshev_beta_grid(std::size_t nodes = 21);

struct TiOptions {
  std::vector<double> betas = chebyshev_beta_grid(21);
  McmcConfig mcmc;
  std::size_t replicas = kDefaultReplicas;
};

/// log Z~_n = -int_0^1 E_beta[H] d beta by the trapezoid rule over `betas`.
/// When every other node forms a sub-grid, the sub-grid value gives the
/// quadrature-error estimate.
PartitionEstimate estimate_log_partition_ti(const InteractionModel& V, const HamiltonianSpec& spec,
                                            const TorusWindow& w, const TiOptions& options, RngStream& rng);

enum class TailDirection { LessEqual, Less, Greater };

struct TailOptions {
  std::vector<double> thresholds;
  TailDirection direction = TailDirection::LessEqual;
  /// Total draws across replicas (binomial reference) or retained samples per
  /// replica chain (mcmc.samples) for interacting models.
  std::size_t samples = 10000;
  McmcConfig mcmc;
  std::size_t replicas = kDefaultReplicas;
};

struct TailEstimate {
  Estimate normalized;
  std::size_t hits = 0;
  std::size_t total = 0;
};

/// (lambda/n) log of the frequency of {Xi_n in tail region} under P_n.
TailEstimate estimate_tail_logprob(const InteractionModel& V, const HamiltonianSpec& spec,
                                   const std::vector<ScoreModel>& scores, const TorusWindow& w,
                                   const TailOptions& options, RngStream& rng);

/// True when V vanishes identically, so P_n is the binomial process.
bool interaction_is_trivial(const InteractionModel& V);

/// Lag-1 autocorrelation of a series (0 for constant series).
double lag1_autocorrelation(const std::vector<double>& xs);

struct ProfileRung {
  std::size_t n = 0;
  Estimate estimate;
};

struct ConvergenceProfile {
  std::vector<ProfileRung> rungs;
  /// value[k+1] - value[k].
  std::vector<double> deltas;
  /// max |delta| over the last three differences.
  double trend_statistic = 0.0;
  /// |delta| strictly decreasing over the last three differences.
  bool shrinking = false;
};

using RungEstimator = std::function<Estimate(const TorusWindow&, RngStream&)>;

/// Runs the estimator on a strictly increasing n-ladder; rung k uses rng.child(k).
ConvergenceProfile convergence_profile(const std::vector<std::size_t>& ladder, double lambda, int d,
                                       const RungEstimator& estimator, RngStream& rng);

enum class PartitionMethod { Auto, Naive, ThermodynamicIntegration };

/// Rung estimator for (lambda/n) log Z~_n.
RungEstimator partition_rung_estimator(const InteractionModel& V, PartitionMethod method, std::size_t naive_samples,
                                       const TiOptions& ti);
/// Rung estimator for (lambda/n) log P(Poisson(n) = n).
RungEstimator stirling_rung_estimator();

struct VariantGapSummary {
  double epsilon = 0.0;
  std::size_t samples = 0;
  /// Samples with boundary_count <= n eps.
  std::size_t eligible = 0;
  double c = 0.0;
  bool c_declared = false;
  double max_gap1 = 0.0;
  double max_gap2 = 0.0;
  double cap1 = 0.0;
  double cap2 = 0.0;
  std::size_t violations1 = 0;
  std::size_t violations2 = 0;
  /// Violations of the per-sample bound |H - H^i| <= 2 c |boundary points|.
  std::size_t sharp_violations = 0;
};

/// Compares periodic and boundary Hamiltonians on binomial samples. c is the
/// declared bound of V, or else the largest per-point energy observed.
VariantGapSummary hamiltonian_variant_gap(const InteractionModel& V, const BoundaryCondition& bc,
                                          const TorusWindow& w, double epsilon, std::size_t samples, RngStream& rng,
                                          std::size_t replicas = kDefaultReplicas);

}  // namespace gibbs
