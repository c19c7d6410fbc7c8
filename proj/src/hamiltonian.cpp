#include "gibbs/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/error.hpp"
#include "gibbs/numeric.hpp"

namespace gibbs {

void check_local_radius(const TorusWindow& w, double r) {
  if (2.0 * r >= w.side()) {
    throw Error(ErrorCode::RadiusTooLarge, "locality radius too large for the window (2r >= w_n)");
  }
}

namespace {

// Cell side for an index serving queries of radius r; r = 0 still needs a grid.
double cell_side_for(const TorusWindow& w, double r) { return r > 0.0 ? r : w.side(); }

LocalView empty_view(int dim, bool origin) {
  LocalView v;
  v.dim = dim;
  v.has_origin = origin;
  return v;
}

LocalView view_at(const CellIndex& index, const Configuration& omega, std::size_t id, double r) {
  if (r <= 0.0) return empty_view(omega.dim(), true);
  return gather_view(index, omega.point(id), r, id);
}

LocalView restrict_view(const LocalView& v, double r) {
  LocalView out = empty_view(v.dim, v.has_origin);
  const double r2 = r * r;
  for (std::size_t k = 0; k < v.count(); ++k) {
    const auto p = v.point(k);
    double acc = 0.0;
    for (double x : p) acc += x * x;
    if (acc <= r2) out.others.insert(out.others.end(), p.begin(), p.end());
  }
  return out;
}

Energy sum_energies(const std::vector<Energy>& parts, std::size_t n, double offset) {
  NeumaierSum acc;
  for (const auto& e : parts) {
    if (e.infinite) return Energy::infinity();
    acc += e.value;
  }
  Energy out{acc.value(), false};
  if (offset != 0.0) out.value += static_cast<double>(n) * offset;
  return out;
}

std::vector<Energy> boundary_terms(const HamiltonianSpec& spec, const InteractionModel& V, const Configuration& omega) {
  const TorusWindow& w = omega.window();
  const BoundaryCondition& bc = *spec.bc;
  if (!(bc.window() == w)) throw Error(ErrorCode::InvalidArgument, "boundary condition built for another window");
  const double r = V.radius();
  const double margin = std::max(bc.width(), r);
  const auto domain = GridDomain::open_box(w.dim(), -w.half_side() - margin, w.side() + 2.0 * margin);

  std::vector<double> combined(omega.coords().begin(), omega.coords().end());
  combined.insert(combined.end(), bc.coords().begin(), bc.coords().end());
  const CellIndex all(domain, combined, cell_side_for(w, r));
  const CellIndex outside(domain, bc.coords(), cell_side_for(w, r));

  std::vector<Energy> parts;
  parts.reserve(omega.size() * 2);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    parts.push_back(V.local_energy(gather_view(all, omega.point(i), r, i)));
  }
  if (spec.convention == Convention::Boundary2) {
    for (std::size_t i = 0; i < omega.size(); ++i) {
      parts.push_back(V.local_energy(gather_view(outside, omega.point(i), r, std::nullopt)));
    }
  }
  return parts;
}

}  // namespace

Energy eval_interaction(const InteractionModel& V, const Configuration& omega, std::size_t focal) {
  if (focal >= omega.size()) throw Error(ErrorCode::InvalidArgument, "focal id out of range");
  check_local_radius(omega.window(), V.radius());
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), V.radius());
  Energy e = V.local_energy(view_at(index, omega, focal, V.radius()));
  if (!e.infinite) e.value += V.offset();
  return e;
}

std::vector<Energy> local_energies(const InteractionModel& V, const Configuration& omega) {
  check_local_radius(omega.window(), V.radius());
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), V.radius());
  std::vector<Energy> out;
  out.reserve(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out.push_back(V.local_energy(view_at(index, omega, i, V.radius())));
  return out;
}

std::vector<Energy> hamiltonian_terms(const HamiltonianSpec& spec, const InteractionModel& V,
                                      const Configuration& omega) {
  validate_spec(spec, V);
  check_local_radius(omega.window(), V.radius());
  if (spec.convention != Convention::Periodic) return boundary_terms(spec, V, omega);
  return local_energies(V, omega);
}

Energy hamiltonian(const HamiltonianSpec& spec, const InteractionModel& V, const Configuration& omega) {
  const auto terms = hamiltonian_terms(spec, V, omega);
  const double offset = spec.convention == Convention::Periodic ? V.offset() : 0.0;
  return sum_energies(terms, omega.size(), offset);
}

std::size_t pair_count_Sr(const Configuration& omega, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "pair radius must be positive");
  check_local_radius(omega.window(), r);
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), r);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    index.visit_ball(omega.point(i), r, [&](std::size_t j, std::span<const double>, double) {
      if (j > i) ++pairs;
    });
  }
  return pairs;
}

std::vector<double> score_average(std::span<const ScoreModel> scores, const Configuration& omega) {
  const std::size_t n = omega.window().point_budget();
  if (omega.size() != n) throw Error(ErrorCode::WrongPointCount, "score averages need exactly n points");
  double r = 0.0;
  for (const auto& s : scores) r = std::max(r, s.radius());
  check_local_radius(omega.window(), r);
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), cell_side_for(omega.window(), r));
  std::vector<NeumaierSum> sums(scores.size());
  for (std::size_t i = 0; i < n; ++i) {
    const LocalView shared = view_at(index, omega, i, r);
    for (std::size_t j = 0; j < scores.size(); ++j) {
      const double rj = scores[j].radius();
      sums[j] += rj < r ? scores[j].evaluate(restrict_view(shared, rj)) : scores[j].evaluate(shared);
    }
  }
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : sums) out.push_back(s.value() / static_cast<double>(n));
  return out;
}

double score_average(const ScoreModel& score, const Configuration& omega) {
  return score_average(std::span<const ScoreModel>(&score, 1), omega).front();
}

std::vector<double> score_values(const ScoreModel& score, const Configuration& omega) {
  const double r = score.radius();
  check_local_radius(omega.window(), r);
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), cell_side_for(omega.window(), r));
  std::vector<double> out;
  out.reserve(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out.push_back(score.evaluate(view_at(index, omega, i, r)));
  return out;
}

double empirical_field_apply(const Configuration& omega, const LocalTestFunction& g) {
  if (!g.g) throw Error(ErrorCode::InvalidArgument, "test function is empty");
  if (!(g.radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "test function radius must be >= 0");
  check_local_radius(omega.window(), g.radius);
  const CellIndex index(GridDomain::torus(omega.window()), omega.coords(), cell_side_for(omega.window(), g.radius));
  NeumaierSum acc;
  for (std::size_t i = 0; i < omega.size(); ++i) acc += g.g(view_at(index, omega, i, g.radius));
  const TorusWindow& w = omega.window();
  return acc.value() / static_cast<double>(w.point_budget()) * w.intensity();
}

double empirical_field_apply(const Configuration& omega, const ScoreModel& xi) {
  return empirical_field_apply(omega, LocalTestFunction{xi.radius(), [&xi](const LocalView& v) { return xi.evaluate(v); }});
}

}  // namespace gibbs
