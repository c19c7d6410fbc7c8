#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately naive: quadratic scans, direct sums, closed forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "gibbs/torus.hpp"

namespace oracle {

inline double distance(const gibbs::Configuration& omega, std::size_t i, std::size_t j) {
  const double w = omega.window().side();
  double s = 0.0;
  const auto x = omega.point(i);
  const auto y = omega.point(j);
  for (std::size_t a = 0; a < x.size(); ++a) {
    double t = std::fabs(x[a] - y[a]);
    t = std::min(t, w - t);
    s += t * t;
  }
  return std::sqrt(s);
}

/// Number of other points within closed distance rho of point i.
inline std::size_t neighbours(const gibbs::Configuration& omega, std::size_t i, double rho) {
  std::size_t c = 0;
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (j != i && distance(omega, i, j) <= rho) ++c;
  }
  return c;
}

inline std::size_t dense_count(const gibbs::Configuration& omega, double rho, std::size_t b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) c += neighbours(omega, i, rho) + 1 >= b;
  return c;
}

inline std::size_t pair_count(const gibbs::Configuration& omega, double r) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    for (std::size_t j = i + 1; j < omega.size(); ++j) c += distance(omega, i, j) <= r;
  }
  return c;
}

/// Strauss energy: each point pays (1/2) log(1/gamma) per neighbour.
inline double strauss_energy(const gibbs::Configuration& omega, double gamma, double r) {
  return std::log(1.0 / gamma) * static_cast<double>(pair_count(omega, r));
}

/// Upper tail probability of a chi-square statistic.
inline double chi_square_pvalue(double stat, double df) { return boost::math::gamma_q(0.5 * df, 0.5 * stat); }

/// Pearson statistic of observed counts against expected counts.
inline double pearson(const std::vector<double>& observed, const std::vector<double>& expected) {
  double s = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double d = observed[k] - expected[k];
    s += d * d / expected[k];
  }
  return s;
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
inline double ks_pvalue(double D, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lam = (sn + 0.12 + 0.11 / sn) * D;
  if (lam < 1e-3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

/// KS distance of a sample against Uniform[a, b).
inline double ks_uniform(std::vector<double> xs, double a, double b) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double D = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = std::clamp((xs[i] - a) / (b - a), 0.0, 1.0);
    D = std::max({D, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  return D;
}

/// log P(Bin(n, p) >= k) by direct summation of the mass function in long
/// double, accumulated relative to the first term.
inline long double log_binomial_upper_tail(std::uint64_t n, double p, std::uint64_t k) {
  if (k > n) return -HUGE_VALL;
  if (k == 0) return 0.0L;
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  auto log_term = [&](std::uint64_t j) {
    return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(j) + 1) -
           std::lgamma(static_cast<long double>(n - j) + 1) + j * lp + (n - j) * lq;
  };
  const long double first = log_term(k);
  long double rel = 0.0L;
  for (std::uint64_t j = k; j <= n; ++j) {
    const long double term = std::exp(log_term(j) - first);
    rel += term;
    if (j > k + 50 && term < rel * 1e-30L) break;
  }
  return first + std::log(rel);
}

/// log P(Poisson(n) = n) = n log n - n - sum_{k<=n} log k, summed term by term.
inline double log_poisson_at_mean(std::uint64_t n) {
  long double s = 0.0L;
  for (std::uint64_t k = 2; k <= n; ++k) s += std::log(static_cast<long double>(k));
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(nn * std::log(nn) - nn - s);
}

/// Cell of x on an L-per-axis partition of [-w/2, w/2).
inline std::size_t grid_cell(std::span<const double> x, double w, std::size_t L) {
  std::size_t cell = 0;
  std::size_t stride = 1;
  for (double v : x) {
    auto k = static_cast<std::size_t>(std::floor((v + 0.5 * w) / w * static_cast<double>(L)));
    k = std::min(k, L - 1);
    cell += k * stride;
    stride *= L;
  }
  return cell;
}

/// Stationary law of two labelled particles on an L x L lattice torus with
/// Strauss weights: pi(s, t) proportional to gamma^{1[adjacent]}, s != t.
/// Returned row-major over (s, t).
inline std::vector<double> toy_two_point_law(std::size_t L, double gamma, bool (*adjacent)(std::size_t, std::size_t, std::size_t)) {
  const std::size_t S = L * L;
  std::vector<double> pi(S * S, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t t = 0; t < S; ++t) {
      if (s == t) continue;
      pi[s * S + t] = adjacent(s, t, L) ? gamma : 1.0;
      total += pi[s * S + t];
    }
  }
  for (double& v : pi) v /= total;
  return pi;
}

/// Nearest-neighbour adjacency on the L x L torus (axis 0 fastest).
inline bool torus_adjacent(std::size_t s, std::size_t t, std::size_t L) {
  const auto sx = static_cast<long>(s % L), sy = static_cast<long>(s / L);
  const auto tx = static_cast<long>(t % L), ty = static_cast<long>(t / L);
  const long l = static_cast<long>(L);
  auto circ = [l](long a, long b) {
    const long d = std::labs(a - b);
    return std::min(d, l - d);
  };
  return circ(sx, tx) + circ(sy, ty) == 1;
}

}  // namespace oracle
