#include "gibbs/couplings.hpp"

#include <algorithm>
#include <numeric>

#include "gibbs/error.hpp"
#include "gibbs/samplers.hpp"

namespace gibbs {

Configuration ResampleCoupling::partner() const {
  std::vector<double> coords;
  coords.reserve(base.coords().size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto p = partner_point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return Configuration(base.window(), std::move(coords));
}

namespace {

void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0,1]");
}

void check_full(const Configuration& base) {
  if (base.size() != base.window().point_budget()) {
    throw Error(ErrorCode::WrongPointCount, "coupling base must hold exactly n points");
  }
}

}  // namespace

ResampleCoupling build_resample_coupling(const Configuration& base, double epsilon, RngStream& rng) {
  check_epsilon(epsilon);
  check_full(base);
  std::vector<double> marks(base.size());
  for (double& u : marks) u = rng.uniform();
  Configuration replacements = sample_binomial(base.window(), rng);
  return {base, std::move(marks), std::move(replacements), epsilon};
}

ResampleCoupling build_resample_coupling_given_E(const Configuration& base, double epsilon, std::size_t b,
                                                 const RConstants& consts, RngStream& rng) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  check_full(base);
  const DenseReport dense = count_b_dense(base, consts.r, b);
  const SparseCubeSet cubes = sparse_cubes(base, consts);
  if (dense.count >= cubes.s_n) {
    throw Error(ErrorCode::DensityExceedsCubes, "more dense points than sparse cubes; E is empty");
  }
  const TorusWindow& w = base.window();
  const auto d = static_cast<std::size_t>(w.dim());
  std::vector<double> marks(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double u = rng.uniform();
    marks[i] = dense.is_dense[i] ? epsilon * u : epsilon + (1.0 - epsilon) * u;
    if (!dense.is_dense[i] && marks[i] >= 1.0) marks[i] = epsilon;
  }
  Configuration fresh = sample_binomial(w, rng);
  std::vector<double> coords(fresh.coords().begin(), fresh.coords().end());
  // Ordered choice of distinct cubes: a partial Fisher-Yates shuffle.
  std::vector<std::size_t> order(cubes.s_n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = 0; k < dense.count; ++k) {
    std::swap(order[k], order[k + rng.index(order.size() - k)]);
    const auto& z = cubes.centers[order[k]];
    const std::size_t id = dense.dense_ids[k];
    for (std::size_t a = 0; a < d; ++a) coords[id * d + a] = rng.uniform(z[a] - 0.5 * consts.r, z[a] + 0.5 * consts.r);
  }
  return {base, std::move(marks), Configuration(w, std::move(coords)), epsilon};
}

Configuration ThinSprinkleCoupling::retained() const {
  std::vector<double> coords;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (marks[i] >= delta) coords.insert(coords.end(), base.point(i).begin(), base.point(i).end());
  }
  return Configuration(base.window(), std::move(coords));
}

Configuration ThinSprinkleCoupling::combined() const {
  const Configuration kept = retained();
  std::vector<double> coords(kept.coords().begin(), kept.coords().end());
  coords.insert(coords.end(), sprinkle.coords().begin(), sprinkle.coords().end());
  return Configuration(base.window(), std::move(coords));
}

ThinSprinkleCoupling build_thin_sprinkle(const TorusWindow& w, double delta, RngStream& rng) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in [0,1)");
  Configuration base = sample_poisson(w, rng);
  std::vector<double> marks(base.size());
  for (double& u : marks) u = rng.uniform();
  const std::uint64_t extra = rng.poisson(delta * static_cast<double>(w.point_budget()));
  Configuration sprinkle = sample_uniform_points(w, extra, rng);
  return {std::move(base), std::move(marks), delta, std::move(sprinkle)};
}

std::string EventReport::failed_clause() const {
  if (!sparse_kept) return "a non-dense point was moved";
  if (!dense_in_sparse_cubes) return "a dense point is not replaced into a sparse cube";
  if (!one_per_cube) return "two moved points share a sparse cube";
  return "none";
}

EventReport detect_event_E_move(const ResampleCoupling& c, std::size_t b, double r, std::optional<RConstants> consts) {
  const TorusWindow& w = c.base.window();
  const RConstants k = consts ? *consts : derive_r_constants(w.intensity(), w.dim(), r);
  if (b <= k.K_r) throw Error(ErrorCode::PreconditionViolated, "E_move needs b > K_r");
  if (w.point_budget() < k.n_r) throw Error(ErrorCode::PreconditionViolated, "E_move needs n >= n_r");
  check_full(c.base);

  const DenseReport dense = count_b_dense(c.base, r, b);
  const SparseCubeSet cubes = sparse_cubes(c.base, k);
  EventReport out;
  out.dense_count = dense.count;
  out.s_n = cubes.s_n;
  std::vector<bool> used(cubes.s_n, false);
  for (std::size_t i = 0; i < c.base.size(); ++i) {
    if (!dense.is_dense[i]) {
      if (c.replaced(i) && out.sparse_kept) {
        out.sparse_kept = false;
        out.witness = i;
      }
      continue;
    }
    // Dense points must actually be moved, into a sparse Q_r(z).
    const auto cube = c.replaced(i) ? sparse_cube_of(cubes, c.partner_point(i)) : std::nullopt;
    if (!cube) {
      if (out.sparse_kept && out.dense_in_sparse_cubes) out.witness = i;
      out.dense_in_sparse_cubes = false;
      continue;
    }
    if (used[*cube]) {
      if (out.sparse_kept && out.dense_in_sparse_cubes && out.one_per_cube) out.witness = i;
      out.one_per_cube = false;
    }
    used[*cube] = true;
  }
  out.holds = out.sparse_kept && out.dense_in_sparse_cubes && out.one_per_cube;
  return out;
}

bool detect_event_E_delete(const ThinSprinkleCoupling& c, double R) {
  const HcViolationReport viol = hc_violations(c.base, R);
  std::vector<bool> flagged(c.base.size(), false);
  for (std::size_t id : viol.violating_ids) flagged[id] = true;
  for (std::size_t i = 0; i < c.base.size(); ++i) {
    const bool deleted = c.marks[i] < c.delta;
    if (flagged[i] != deleted) return false;
  }
  return true;
}

}  // namespace gibbs
