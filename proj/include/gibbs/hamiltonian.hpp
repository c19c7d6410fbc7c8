#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gibbs/models.hpp"
#include "gibbs/torus.hpp"

namespace gibbs {

/// Throws RadiusTooLarge unless 2r < w_n.
void check_local_radius(const TorusWindow& w, double r);

/// V(omega^(n) - x) for the focal point, offset included.
Energy eval_interaction(const InteractionModel& V, const Configuration& omega, std::size_t focal);

/// Per-point energies V(omega^(n) - x), offset excluded.
std::vector<Energy> local_energies(const InteractionModel& V, const Configuration& omega);

/// Summands of the Hamiltonian, offset excluded: one per point, plus one per
/// point for the outside-only term of the second boundary convention.
std::vector<Energy> hamiltonian_terms(const HamiltonianSpec& spec, const InteractionModel& V,
                                      const Configuration& omega);

Energy hamiltonian(const HamiltonianSpec& spec, const InteractionModel& V, const Configuration& omega);

/// Unordered pairs at torus distance <= r.
std::size_t pair_count_Sr(const Configuration& omega, double r);

/// Xi_n(omega) = (1/n) sum_x xi(omega^(n) - x), one entry per score. Requires |omega| = n.
std::vector<double> score_average(std::span<const ScoreModel> scores, const Configuration& omega);
double score_average(const ScoreModel& score, const Configuration& omega);

/// Per-point score values xi(omega^(n) - x).
std::vector<double> score_values(const ScoreModel& score, const Configuration& omega);

/// Bounded local test function g with locality radius.
struct LocalTestFunction {
  double radius = 0.0;
  std::function<double(const LocalView&)> g;
};

/// R_{n,omega}(g) = (1/|W_n|) sum_x g(omega^(n) - x).
double empirical_field_apply(const Configuration& omega, const LocalTestFunction& g);
double empirical_field_apply(const Configuration& omega, const ScoreModel& xi);

}  // namespace gibbs
