#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/diagnostics.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/torus.hpp"

namespace gibbs {

/// Base binomial configuration with uniform marks and fresh replacement
/// points; point i is replaced when its mark is below epsilon.
struct ResampleCoupling {
  Configuration base;
  std::vector<double> marks;
  Configuration replacements;
  double epsilon = 0.0;

  bool replaced(std::size_t i) const { return marks[i] < epsilon; }
  std::span<const double> partner_point(std::size_t i) const {
    return replaced(i) ? replacements.point(i) : base.point(i);
  }
  Configuration partner() const;
};

ResampleCoupling build_resample_coupling(const Configuration& base, double epsilon, RngStream& rng);

/// Draws marks and replacements from their law conditioned on E_{n,b,eps}:
/// sparse marks in [eps, 1), dense marks in (0, eps), dense replacements in
/// distinct uniformly chosen Q_r(z), z in S_n. Requires N^r_{n,b} < s_n.
ResampleCoupling build_resample_coupling_given_E(const Configuration& base, double epsilon, std::size_t b,
                                                 const RConstants& consts, RngStream& rng);

/// Poisson base with marks, delete rule mark < delta, and an independent
/// Poisson(delta n) sprinkle.
struct ThinSprinkleCoupling {
  Configuration base;
  std::vector<double> marks;
  double delta = 0.0;
  Configuration sprinkle;

  Configuration retained() const;
  Configuration combined() const;
};

ThinSprinkleCoupling build_thin_sprinkle(const TorusWindow& w, double delta, RngStream& rng);

struct EventReport {
  bool holds = false;
  bool sparse_kept = true;
  bool dense_in_sparse_cubes = true;
  bool one_per_cube = true;
  std::size_t dense_count = 0;
  std::size_t s_n = 0;
  /// First id violating the failing clause, if any.
  std::optional<std::size_t> witness;
  std::string failed_clause() const;
};

/// Evaluates E_{n,b,eps} for the coupling. Requires b > K_r and n >= n_r.
EventReport detect_event_E_move(const ResampleCoupling& c, std::size_t b, double r,
                                std::optional<RConstants> consts = {});

/// Every base point with an R-neighbour is deleted (mark < delta) and every
/// other base point is kept.
bool detect_event_E_delete(const ThinSprinkleCoupling& c, double R);

}  // namespace gibbs
