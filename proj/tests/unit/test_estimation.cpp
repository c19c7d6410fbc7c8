#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "gibbs/diagnostics.hpp"
#include "gibbs/error.hpp"
#include "gibbs/estimation.hpp"
#include "gibbs/hamiltonian.hpp"

using namespace gibbs;

namespace {

TiOptions quick_ti() {
  TiOptions ti;
  ti.mcmc.burn_in_sweeps = 100;
  ti.mcmc.thinning_sweeps = 5;
  ti.mcmc.samples = 100;
  return ti;
}

}  // namespace

TEST(Merge, OrderInsensitive) {
  std::vector<double> v = {0.1, 1e-17, -3.0, 2.5, 1e16, -1e16, 0.3};
  const Estimate a = merge_replicas(v, 70, "x");
  std::reverse(v.begin(), v.end());
  const Estimate b = merge_replicas(v, 70, "x");
  std::rotate(v.begin(), v.begin() + 3, v.end());
  const Estimate c = merge_replicas(v, 70, "x");
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(a.std_error, c.std_error);
}

TEST(Merge, StdErrorFromReplicaSpread) {
  const Estimate e = merge_replicas({1.0, 2.0, 3.0, 4.0}, 40, "m");
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt((1.25 * 4 / 3.0) / 4.0), 1e-15);
}

TEST(Chebyshev, GridEndpointsAndSymmetry) {
  const auto g = chebyshev_beta_grid(21);
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(g[j] + g[g.size() - 1 - j], 1.0, 1e-15);
}

TEST(Naive, GammaOneIsExactlyZero) {
  RngStream rng(41, 0);
  const PartitionEstimate p = estimate_log_partition_naive(InteractionModel::strauss(1.0, 0.5),
                                                           HamiltonianSpec::periodic(), TorusWindow(2, 1.0, 20), 2000, rng);
  EXPECT_EQ(p.normalized.value, 0.0);
  EXPECT_EQ(p.nonzero_fraction, 1.0);
  EXPECT_NEAR(p.normalized_z.value, stirling_log_prob(20).normalized, 1e-15);
}

TEST(Naive, Preconditions) {
  RngStream rng(42, 0);
  const TorusWindow w(2, 1.0, 50);
  EXPECT_THROW(estimate_log_partition_naive(InteractionModel::strauss(0.5, 0.5), HamiltonianSpec::periodic(), w, 999, rng),
               Error);
  try {
    estimate_log_partition_naive(InteractionModel::hard_core(0.5), HamiltonianSpec::periodic(), w, 1000, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllZeroWeights);
  }
}

TEST(Naive, HardCoreAcceptanceFallsWithRadius) {
  const TorusWindow w(2, 1.0, 10);
  double prev = 2.0;
  for (double R : {0.1, 0.2, 0.3}) {
    RngStream rng(43, 0);
    const PartitionEstimate p =
        estimate_log_partition_naive(InteractionModel::hard_core(R), HamiltonianSpec::periodic(), w, 20000, rng);
    EXPECT_LE(p.nonzero_fraction, prev);
    EXPECT_LE(p.log_z_tilde.value, 0.0);
    prev = p.nonzero_fraction;
  }
}

TEST(Estimators, NaiveAndTiAgree) {
  const InteractionModel V = InteractionModel::strauss(0.5, 0.5);
  for (std::size_t n : {2, 8, 32}) {
    const TorusWindow w(2, 1.0, n);
    RngStream a(44, n), b(45, n);
    const PartitionEstimate naive = estimate_log_partition_naive(V, HamiltonianSpec::periodic(), w, 200000, a);
    const PartitionEstimate ti = estimate_log_partition_ti(V, HamiltonianSpec::periodic(), w, quick_ti(), b);
    const double sigma = std::hypot(naive.log_z_tilde.std_error, ti.log_z_tilde.std_error);
    // Quadrature error is deterministic bias; allow it on top of the noise.
    EXPECT_LE(std::fabs(naive.log_z_tilde.value - ti.log_z_tilde.value),
              3.0 * sigma + ti.quadrature_error * static_cast<double>(n))
        << "n=" << n << " naive=" << naive.log_z_tilde.value << " ti=" << ti.log_z_tilde.value;
    EXPECT_LE(naive.normalized.value, 0.0);
    EXPECT_LE(ti.normalized.value, 0.0);
    ASSERT_TRUE(ti.coarse_normalized.has_value());
    EXPECT_LT(ti.max_lag1_autocorrelation, 1.0);
  }
}

TEST(Ti, GammaOneIsExactlyZero) {
  RngStream rng(46, 0);
  const PartitionEstimate p = estimate_log_partition_ti(InteractionModel::strauss(1.0, 0.5),
                                                        HamiltonianSpec::periodic(), TorusWindow(2, 1.0, 40), quick_ti(), rng);
  EXPECT_EQ(p.normalized.value, 0.0);
}

TEST(Estimators, IndependentOfThreadCount) {
  const InteractionModel V = InteractionModel::strauss(0.5, 0.5);
  const TorusWindow w(2, 1.0, 16);
  auto once = [&](const char* threads) {
    setenv("GIBBS_LDP_THREADS", threads, 1);
    RngStream rng(47, 0);
    TiOptions ti = quick_ti();
    ti.betas = chebyshev_beta_grid(5);
    return estimate_log_partition_ti(V, HamiltonianSpec::periodic(), w, ti, rng).normalized;
  };
  const Estimate one = once("1");
  const Estimate four = once("4");
  unsetenv("GIBBS_LDP_THREADS");
  EXPECT_EQ(one.value, four.value);
  EXPECT_EQ(one.std_error, four.std_error);
}

TEST(Tail, WholeSpaceAndZeroHits) {
  const TorusWindow w(2, 1.0, 30);
  TailOptions opt;
  opt.samples = 2000;
  opt.thresholds = {HUGE_VAL};
  RngStream rng(48, 0);
  const std::vector<ScoreModel> scores = {ScoreModel::neighbor_count(0.5)};
  const TailEstimate all = estimate_tail_logprob(InteractionModel::strauss(1.0, 0.5), HamiltonianSpec::periodic(),
                                                 scores, w, opt, rng);
  EXPECT_EQ(all.hits, all.total);
  EXPECT_EQ(all.normalized.value, 0.0);

  opt.thresholds = {100.0};
  opt.direction = TailDirection::Greater;
  try {
    estimate_tail_logprob(InteractionModel::strauss(1.0, 0.5), HamiltonianSpec::periodic(), scores, w, opt, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroHits);
  }
}

TEST(Tail, MatchesBinomialFrequency) {
  // Under the binomial reference with n = 2, Xi = neighbour average is 0 or 1.
  const TorusWindow w(2, 1.0, 2);
  TailOptions opt;
  opt.samples = 200000;
  opt.thresholds = {0.5};
  opt.direction = TailDirection::Greater;
  RngStream rng(49, 0);
  const TailEstimate t = estimate_tail_logprob(InteractionModel::strauss(1.0, 0.5), HamiltonianSpec::periodic(),
                                               {ScoreModel::neighbor_count(0.5)}, w, opt, rng);
  const double p = M_PI * 0.25 / 2.0;
  EXPECT_NEAR(t.normalized.value, 0.5 * std::log(p), 4 * t.normalized.std_error);
}

TEST(Profile, StirlingRungsMatchClosedForm) {
  RngStream rng(50, 0);
  const std::vector<std::size_t> ladder = {8, 16, 32, 64, 128};
  const ConvergenceProfile p = convergence_profile(ladder, 1.0, 2, stirling_rung_estimator(), rng);
  ASSERT_EQ(p.rungs.size(), 5u);
  for (const auto& r : p.rungs) EXPECT_EQ(r.estimate.value, stirling_log_prob(r.n).normalized);
  EXPECT_TRUE(p.shrinking);
  EXPECT_EQ(p.deltas.size(), 4u);
  EXPECT_THROW(convergence_profile({8, 8}, 1.0, 2, stirling_rung_estimator(), rng), Error);
}

TEST(Profile, GammaOneLadderIsZero) {
  RngStream rng(51, 0);
  const ConvergenceProfile p =
      convergence_profile({8, 16, 32, 64}, 1.0, 2,
                          partition_rung_estimator(InteractionModel::strauss(1.0, 0.5), PartitionMethod::Auto, 1000,
                                                   quick_ti()),
                          rng);
  for (const auto& r : p.rungs) EXPECT_EQ(r.estimate.value, 0.0);
  EXPECT_EQ(p.trend_statistic, 0.0);
}

TEST(VariantGap, EmptyBoundaryCapsHold) {
  const TorusWindow w(2, 1.0, 100);
  const BoundaryCondition bc(w, {}, 0.5);
  RngStream rng(52, 0);
  const VariantGapSummary s = hamiltonian_variant_gap(InteractionModel::strauss(0.5, 0.5), bc, w, 0.2, 500, rng);
  EXPECT_EQ(s.samples, 500u);
  EXPECT_EQ(s.violations1 + s.violations2 + s.sharp_violations, 0u);
  EXPECT_FALSE(s.c_declared);
  const VariantGapSummary capped =
      hamiltonian_variant_gap(InteractionModel::truncated_hard_core(0.5, 1.0), bc, w, 0.2, 500, rng);
  EXPECT_TRUE(capped.c_declared);
  EXPECT_EQ(capped.c, 1.0);
  EXPECT_EQ(capped.violations1 + capped.violations2, 0u);
}
