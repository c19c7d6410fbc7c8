#include <gtest/gtest.h>

#include <cmath>

#include "gibbs/diagnostics.hpp"
#include "gibbs/error.hpp"
#include "gibbs/hamiltonian.hpp"
#include "gibbs/samplers.hpp"
#include "support/oracles.hpp"

using namespace gibbs;

namespace {

// Brute-force k-wise energy of point i: (k-1)-subsets of its r-neighbours,
// optionally requiring all members pairwise within r.
double kwise_oracle(const Configuration& omega, std::size_t i, int k, double r, bool clique, double c) {
  std::vector<std::size_t> nb;
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (j != i && oracle::distance(omega, i, j) <= r) nb.push_back(j);
  }
  const std::size_t m = nb.size();
  double count = 0.0;
  auto close = [&](std::size_t a, std::size_t b) { return !clique || oracle::distance(omega, nb[a], nb[b]) <= r; };
  if (k == 2) count = static_cast<double>(m);
  if (k == 3) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) count += close(a, b);
  }
  if (k == 4) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        for (std::size_t e = b + 1; e < m; ++e) count += close(a, b) && close(a, e) && close(b, e);
  }
  return c * count;
}

Configuration with_point(const Configuration& omega, std::span<const double> x) {
  std::vector<double> coords(omega.coords().begin(), omega.coords().end());
  coords.insert(coords.end(), x.begin(), x.end());
  return Configuration(omega.window(), std::move(coords));
}

}  // namespace

TEST(Energy, InfinityHasZeroWeight) {
  EXPECT_EQ(Energy::infinity().weight(), 0.0);
  EXPECT_EQ(Energy::infinity().weight(0.0), 1.0);
  EXPECT_TRUE((Energy{1.0, false} + Energy::infinity()).infinite);
  EXPECT_DOUBLE_EQ((Energy{2.0, false}).weight(), std::exp(-2.0));
}

TEST(Models, ParameterValidation) {
  EXPECT_THROW(InteractionModel::strauss(1.5, 0.5), Error);
  EXPECT_THROW(InteractionModel::strauss(0.0, 0.5), Error);
  EXPECT_THROW(InteractionModel::kwise(5, 0.5, TuplePotential::Constant, 1.0), Error);
  EXPECT_THROW(InteractionModel::hard_core(-1.0), Error);
  EXPECT_THROW(ScoreModel::indicator(0.5, 0), Error);
}

TEST(Models, StraussHamiltonianIsPairCount) {
  RngStream rng(21, 0);
  for (int t = 0; t < 200; ++t) {
    const double gamma = rng.uniform(0.05, 1.0);
    const TorusWindow w(2, 1.0, 20 + rng.index(100));
    const Configuration omega = sample_binomial(w, rng);
    const InteractionModel V = InteractionModel::strauss(gamma, 0.5);
    const double H = hamiltonian(HamiltonianSpec::periodic(), V, omega).value;
    const auto S = pair_count_Sr(omega, 0.5);
    ASSERT_EQ(S, oracle::pair_count(omega, 0.5));
    const double expect = std::log(1.0 / gamma) * static_cast<double>(S);
    ASSERT_LE(std::fabs(H - expect), 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, expect));
  }
}

TEST(Models, KWiseMatchesBruteForce) {
  RngStream rng(22, 0);
  for (int t = 0; t < 60; ++t) {
    const int k = 2 + t % 3;
    const bool clique = t % 2 == 0;
    const TorusWindow w(2, 3.0, 80);
    const Configuration omega = sample_binomial(w, rng);
    const InteractionModel V =
        InteractionModel::kwise(k, 0.6, clique ? TuplePotential::Clique : TuplePotential::Constant, 0.3);
    const auto e = local_energies(V, omega);
    for (std::size_t i = 0; i < omega.size(); ++i) {
      ASSERT_NEAR(e[i].value, kwise_oracle(omega, i, k, 0.6, clique, 0.3), 1e-12) << "k=" << k;
    }
  }
}

TEST(Models, ConstantShiftAddsNTimesConstant) {
  RngStream rng(23, 0);
  const TorusWindow w(2, 1.0, 60);
  const InteractionModel V = InteractionModel::strauss(0.4, 0.5);
  for (int t = 0; t < 50; ++t) {
    const Configuration omega = sample_binomial(w, rng);
    const double H = hamiltonian(HamiltonianSpec::periodic(), V, omega).value;
    const double Hc = hamiltonian(HamiltonianSpec::periodic(), V.shifted(0.75), omega).value;
    ASSERT_NEAR(Hc - H, 60 * 0.75, 1e-10);
  }
}

TEST(Models, ConstantShiftLeavesChainsIdentical) {
  const TorusWindow w(2, 1.0, 40);
  const InteractionModel V = InteractionModel::strauss(0.3, 0.5);
  McmcConfig cfg;
  cfg.burn_in_sweeps = 20;
  cfg.thinning_sweeps = 2;
  cfg.samples = 5;
  RngStream a(24, 1), b(24, 1);
  const auto plain = mcmc_canonical(V, HamiltonianSpec::periodic(), w, cfg, a);
  const auto shifted = mcmc_canonical(V.shifted(3.0), HamiltonianSpec::periodic(), w, cfg, b);
  ASSERT_EQ(plain.size(), shifted.size());
  for (std::size_t s = 0; s < plain.size(); ++s) {
    const auto x = plain[s].coords();
    const auto y = shifted[s].coords();
    ASSERT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
  }
}

TEST(Models, HardCoreDichotomy) {
  RngStream rng(25, 0);
  const TorusWindow w(2, 1.0, 30);
  const InteractionModel V = InteractionModel::hard_core(0.3);
  std::size_t zeros = 0;
  for (int t = 0; t < 300; ++t) {
    const Configuration omega = sample_binomial(w, rng);
    const double weight = hamiltonian(HamiltonianSpec::periodic(), V, omega).weight();
    const bool clean = oracle::dense_count(omega, 0.3, 2) == 0;
    ASSERT_EQ(weight, clean ? 1.0 : 0.0);
    ASSERT_EQ(clean, hc_violations(omega, 0.3).count == 0);
    zeros += weight == 0.0;
  }
  EXPECT_GT(zeros, 0u);
}

TEST(Models, IncreasingModelsAreMonotoneUnderInsertion) {
  RngStream rng(26, 0);
  const TorusWindow w(2, 2.0, 60);
  const InteractionModel models[] = {InteractionModel::strauss(0.5, 0.5),
                                     InteractionModel::kwise(3, 0.5, TuplePotential::Clique, 1.0),
                                     InteractionModel::truncated_hard_core(0.3, 2.0)};
  const ScoreModel scores[] = {ScoreModel::neighbor_count(0.5), ScoreModel::tuple(3, 0.5, TuplePotential::Constant, 1.0),
                               ScoreModel::indicator(0.5, 2)};
  for (int t = 0; t < 200; ++t) {
    const Configuration omega = sample_uniform_points(w, 59, rng);
    const double x[] = {rng.uniform(-w.half_side(), w.half_side()), rng.uniform(-w.half_side(), w.half_side())};
    const Configuration bigger = with_point(omega, x);
    for (const auto& V : models) {
      ASSERT_TRUE(V.is_increasing());
      // Energies per retained point never decrease.
      const auto before = local_energies(V, omega);
      const auto after = local_energies(V, bigger);
      for (std::size_t i = 0; i < omega.size(); ++i) ASSERT_LE(before[i].value, after[i].value);
    }
    for (const auto& xi : scores) {
      const auto before = score_values(xi, omega);
      const auto after = score_values(xi, bigger);
      for (std::size_t i = 0; i < omega.size(); ++i) ASSERT_LE(before[i], after[i]);
    }
  }
}

TEST(Models, EnergiesAreLocal) {
  RngStream rng(27, 0);
  const TorusWindow w(2, 1.0, 200);
  const double r = 0.5;
  const InteractionModel V = InteractionModel::kwise(3, r, TuplePotential::Clique, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Configuration omega = sample_binomial(w, rng);
    const auto before = local_energies(V, omega);
    // Move a point that is farther than 2r from point 0, keeping it far.
    std::size_t far = 1;
    while (torus_distance(omega.point(0), omega.point(far), w) <= 2 * r + 1.5) ++far;
    std::vector<double> coords(omega.coords().begin(), omega.coords().end());
    const Point target = w.wrap(std::vector<double>{omega.point(0)[0] + w.half_side(), omega.point(0)[1]});
    coords[2 * far] = target[0];
    coords[2 * far + 1] = target[1];
    const Configuration moved(w, std::move(coords));
    const auto after = local_energies(V, moved);
    for (std::size_t i = 0; i < omega.size(); ++i) {
      if (torus_distance(omega.point(0), omega.point(i), w) <= r) ASSERT_EQ(before[i], after[i]);
    }
  }
}

TEST(Models, CardinalityBoundHolds) {
  RngStream rng(28, 0);
  const TorusWindow w(2, 4.0, 100);
  const double r = 0.5;
  const InteractionModel models[] = {InteractionModel::strauss(0.5, r),
                                     InteractionModel::kwise(2, r, TuplePotential::Constant, 1.0),
                                     InteractionModel::kwise(3, r, TuplePotential::Constant, 0.5),
                                     InteractionModel::kwise(4, r, TuplePotential::Clique, 2.0),
                                     InteractionModel::truncated_hard_core(r, 1.5)};
  for (int t = 0; t < 40; ++t) {
    const Configuration omega = sample_binomial(w, rng);
    for (const auto& V : models) {
      const auto e = local_energies(V, omega);
      for (std::size_t i = 0; i < omega.size(); ++i) {
        const std::size_t b = oracle::neighbours(omega, i, r) + 1;
        ASSERT_LE(e[i].value, *V.cardinality_bound(b) + 1e-12);
      }
    }
  }
  EXPECT_FALSE(InteractionModel::hard_core(r).cardinality_bound(2).has_value());
  EXPECT_EQ(*InteractionModel::hard_core(r).capped(3.0).cardinality_bound(5), 3.0);
}

TEST(Models, CappedHardCoreReturnsCap) {
  const TorusWindow w(2, 1.0, 4);
  const Configuration omega(w, std::vector<Point>{{0.0, 0.0}, {0.1, 0.0}});
  const auto e = local_energies(InteractionModel::hard_core(0.3).capped(2.5), omega);
  EXPECT_EQ(e[0], (Energy{2.5, false}));
}

TEST(Models, ScoreBoundsAndValues) {
  EXPECT_EQ(*ScoreModel::indicator(0.5, 2).bound(), 1.0);
  EXPECT_FALSE(ScoreModel::neighbor_count(0.5).bound().has_value());
  EXPECT_EQ(*ScoreModel::neighbor_count(0.5).cardinality_bound(4), 4.0);
  EXPECT_EQ(*ScoreModel::neighbor_count(0.5).capped(3.0).bound(), 3.0);
  const TorusWindow w(2, 1.0, 16);
  const Configuration omega(w, std::vector<Point>{{0.0, 0.0}, {0.3, 0.0}, {1.5, 1.5}});
  const auto v = score_values(ScoreModel::neighbor_count(0.5), omega);
  EXPECT_EQ(v, (std::vector<double>{1.0, 1.0, 0.0}));
  const auto ind = score_values(ScoreModel::indicator(0.5, 2), omega);
  EXPECT_EQ(ind, (std::vector<double>{1.0, 1.0, 0.0}));
}

TEST(Models, ScoreAverageNeedsNPoints) {
  const TorusWindow w(2, 1.0, 4);
  const Configuration omega(w, std::vector<Point>{{0.0, 0.0}});
  try {
    score_average(ScoreModel::constant(1.0), omega);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongPointCount);
  }
}

TEST(EmpiricalField, ConstantOneGivesLambda) {
  RngStream rng(29, 0);
  for (double lambda : {0.5, 1.0, 3.0}) {
    const TorusWindow w(2, lambda, 50);
    const Configuration omega = sample_binomial(w, rng);
    EXPECT_DOUBLE_EQ(empirical_field_apply(omega, LocalTestFunction{0.1, [](const LocalView&) { return 1.0; }}), lambda);
    const ScoreModel xi = ScoreModel::neighbor_count(0.4);
    EXPECT_NEAR(empirical_field_apply(omega, xi), lambda * score_average(xi, omega), 1e-12);
  }
  const TorusWindow w(2, 1.0, 4);
  const Configuration isolated(w, std::vector<Point>{{-0.9, -0.9}, {0.5, 0.5}});
  const LocalTestFunction pairs{0.3, [](const LocalView& eta) { return eta.count() + 1 >= 2 ? 1.0 : 0.0; }};
  EXPECT_EQ(empirical_field_apply(isolated, pairs), 0.0);
}

TEST(Boundary, RejectsHardCoreAndOffset) {
  const TorusWindow w(2, 1.0, 16);
  const BoundaryCondition bc(w, {}, 0.5);
  const Configuration omega(w, std::vector<Point>{{0.0, 0.0}});
  try {
    hamiltonian(HamiltonianSpec::boundary1(bc), InteractionModel::hard_core(0.3), omega);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedBoundaryModel);
  }
  EXPECT_THROW(hamiltonian(HamiltonianSpec::boundary2(bc), InteractionModel::strauss(0.5, 0.5).shifted(1.0), omega),
               Error);
}

TEST(Boundary, KeepsOnlyAnnulusPoints) {
  const TorusWindow w(2, 1.0, 16);
  const BoundaryCondition bc(w, {{0.0, 0.0}, {2.2, 0.0}, {2.6, 0.0}, {-2.0 - 0.1, -2.05}}, 0.5);
  EXPECT_EQ(bc.size(), 2u);
}

TEST(Boundary, InteriorConfigurationsMatchPeriodic) {
  RngStream rng(30, 0);
  const TorusWindow w(2, 1.0, 100);
  const double r = 0.5;
  const InteractionModel V = InteractionModel::strauss(0.5, r);
  const BoundaryCondition empty(w, {}, r);
  for (int t = 0; t < 50; ++t) {
    // Points confined to the interior box [-w/2 + r, w/2 - r).
    std::vector<Point> pts;
    const double h = w.half_side() - r;
    for (int i = 0; i < 60; ++i) pts.push_back({rng.uniform(-h, h), rng.uniform(-h, h)});
    const Configuration omega(w, pts);
    const double H = hamiltonian(HamiltonianSpec::periodic(), V, omega).value;
    ASSERT_NEAR(hamiltonian(HamiltonianSpec::boundary1(empty), V, omega).value, H, 1e-9);
    ASSERT_NEAR(hamiltonian(HamiltonianSpec::boundary2(empty), V, omega).value, H, 1e-9);
  }
}

TEST(Boundary, CrossTermsCountBoundaryNeighbours) {
  // One interior point near the right face and one boundary point just outside.
  const TorusWindow w(2, 1.0, 16);
  const double r = 0.5;
  const InteractionModel V = InteractionModel::strauss(0.5, r);
  const BoundaryCondition bc(w, {{2.2, 0.0}}, r);
  const Configuration omega(w, std::vector<Point>{{1.9, 0.0}});
  const double unit = 0.5 * std::log(2.0);
  EXPECT_NEAR(hamiltonian(HamiltonianSpec::periodic(), V, omega).value, 0.0, 1e-15);
  EXPECT_NEAR(hamiltonian(HamiltonianSpec::boundary1(bc), V, omega).value, unit, 1e-12);
  EXPECT_NEAR(hamiltonian(HamiltonianSpec::boundary2(bc), V, omega).value, 2 * unit, 1e-12);
}
