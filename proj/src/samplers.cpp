#include "gibbs/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/error.hpp"
#include "gibbs/hamiltonian.hpp"
#include "gibbs/numeric.hpp"

namespace gibbs {

Configuration sample_uniform_points(const TorusWindow& w, std::size_t count, RngStream& rng) {
  const double h = w.half_side();
  std::vector<double> coords(count * static_cast<std::size_t>(w.dim()));
  for (double& x : coords) x = rng.uniform(-h, h);
  return Configuration(w, std::move(coords));
}

Configuration sample_binomial(const TorusWindow& w, RngStream& rng) {
  return sample_uniform_points(w, w.point_budget(), rng);
}

Configuration sample_poisson(const TorusWindow& w, RngStream& rng) {
  const std::uint64_t count = rng.poisson(static_cast<double>(w.point_budget()));
  return sample_uniform_points(w, count, rng);
}

Point lattice_site(const TorusWindow& w, std::size_t sites_per_axis, std::size_t site) {
  if (sites_per_axis == 0) throw Error(ErrorCode::InvalidArgument, "lattice needs at least one site per axis");
  const double spacing = w.side() / static_cast<double>(sites_per_axis);
  Point p(static_cast<std::size_t>(w.dim()));
  for (auto& x : p) {
    x = -w.half_side() + (static_cast<double>(site % sites_per_axis) + 0.5) * spacing;
    site /= sites_per_axis;
  }
  return p;
}

void check_hard_core_intensity(const TorusWindow& w, double R) {
  const double packing = w.intensity() * unit_ball_volume(w.dim()) * std::pow(R, w.dim());
  if (!(packing < 1.0)) {
    throw Error(ErrorCode::IntensityAssumption,
                "hard-core model needs lambda * v_d * R^d < 1, got " + std::to_string(packing));
  }
}

Configuration hard_core_start(const TorusWindow& w, double R, RngStream& rng) {
  check_hard_core_intensity(w, R);
  check_local_radius(w, R);
  const std::size_t n = w.point_budget();
  const auto d = static_cast<std::size_t>(w.dim());
  const double h = w.half_side();
  std::vector<double> placed;
  std::vector<double> candidate(d);
  std::size_t attempts = 0;
  while (placed.size() < n * d && attempts < 100 * n) {
    ++attempts;
    for (double& x : candidate) x = rng.uniform(-h, h);
    bool clash = false;
    for (std::size_t k = 0; k < placed.size() / d && !clash; ++k) {
      double acc = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        double delta = std::abs(placed[k * d + a] - candidate[a]);
        if (delta > h) delta = w.side() - delta;
        acc += delta * delta;
      }
      clash = acc <= R * R;
    }
    if (!clash) placed.insert(placed.end(), candidate.begin(), candidate.end());
  }
  if (placed.size() == n * d) return Configuration(w, std::move(placed));

  auto per_axis = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.0 / w.dim()) - 1e-9));
  while (ipow(static_cast<double>(per_axis), w.dim()) < static_cast<double>(n)) ++per_axis;
  if (!(w.side() / static_cast<double>(per_axis) > R)) {
    throw Error(ErrorCode::InfeasibleStart, "no hard-core initial configuration found");
  }
  std::vector<Point> sites;
  for (std::size_t s = 0; s < n; ++s) sites.push_back(lattice_site(w, per_axis, s));
  return Configuration(w, sites);
}

namespace {

Configuration initial_state(const InteractionModel& V, const TorusWindow& w, const McmcConfig& cfg, RngStream& rng) {
  if (cfg.initial) {
    if (!(cfg.initial->window() == w) || cfg.initial->size() != w.point_budget()) {
      throw Error(ErrorCode::WrongPointCount, "initial configuration must hold n points of the same window");
    }
    return *cfg.initial;
  }
  if (cfg.proposal == ProposalKind::Lattice) {
    const std::size_t sites = static_cast<std::size_t>(ipow(static_cast<double>(cfg.lattice_sites), w.dim()));
    if (sites < w.point_budget()) throw Error(ErrorCode::InfeasibleStart, "lattice has fewer sites than points");
    std::vector<std::size_t> chosen;
    while (chosen.size() < w.point_budget()) {
      const std::size_t s = rng.index(sites);
      if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) chosen.push_back(s);
    }
    std::vector<Point> pts;
    for (std::size_t s : chosen) pts.push_back(lattice_site(w, cfg.lattice_sites, s));
    return Configuration(w, pts);
  }
  if (V.is_hard_core()) return hard_core_start(w, V.radius(), rng);
  return sample_binomial(w, rng);
}

GridDomain chain_domain(const HamiltonianSpec& spec, const TorusWindow& w, double r) {
  if (spec.convention == Convention::Periodic) return GridDomain::torus(w);
  const double margin = std::max(spec.bc->width(), r);
  return GridDomain::open_box(w.dim(), -w.half_side() - margin, w.side() + 2.0 * margin);
}

void validate_mcmc(const InteractionModel& V, const HamiltonianSpec& spec, const TorusWindow& w, const McmcConfig& cfg) {
  validate_spec(spec, V);
  check_local_radius(w, V.radius());
  if (cfg.burn_in_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "burn-in must be at least one sweep");
  if (cfg.thinning_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "thinning must be at least one sweep");
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
  if (cfg.proposal == ProposalKind::Lattice && cfg.lattice_sites == 0) {
    throw Error(ErrorCode::InvalidArgument, "lattice proposals need lattice_sites > 0");
  }
  if (V.is_hard_core()) check_hard_core_intensity(w, V.radius());
}

}  // namespace

McmcChain::McmcChain(const InteractionModel& V, const HamiltonianSpec& spec, const TorusWindow& w,
                     const McmcConfig& cfg, RngStream& rng)
    : V_((validate_mcmc(V, spec, w, cfg), V)),
      spec_(spec),
      window_(w),
      cfg_(cfg),
      rng_(rng),
      index_(chain_domain(spec, w, V.radius()), initial_state(V, w, cfg, rng).coords(), V.radius()) {
  if (spec_.convention != Convention::Periodic) {
    outside_.emplace(chain_domain(spec, w, V.radius()), spec_.bc->coords(), V.radius());
  }
  cfg_.initial.reset();
  scratch_.resize(static_cast<std::size_t>(w.dim()));
  const Energy start = hamiltonian(spec_, V_, configuration());
  if (start.infinite && !V_.is_hard_core()) {
    throw Error(ErrorCode::InfeasibleStart, "initial configuration has infinite energy");
  }
}

Configuration McmcChain::configuration() const {
  std::vector<double> coords;
  coords.reserve(size() * scratch_.size());
  for (std::size_t i = 0; i < size(); ++i) coords.insert(coords.end(), point(i).begin(), point(i).end());
  return Configuration(window_, std::move(coords));
}

double McmcChain::acceptance_rate() const {
  return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
}

Energy McmcChain::local_energy(std::size_t id, std::span<const double> pos) const {
  LocalView view = gather_view(index_, pos, V_.radius(), id);
  if (outside_) {
    const LocalView extra = gather_view(*outside_, pos, V_.radius(), std::nullopt);
    view.others.insert(view.others.end(), extra.others.begin(), extra.others.end());
  }
  return V_.local_energy(view);
}

Energy McmcChain::outside_energy(std::span<const double> pos) const {
  if (spec_.convention != Convention::Boundary2) return {};
  return V_.local_energy(gather_view(*outside_, pos, V_.radius(), std::nullopt));
}

void McmcChain::propose_position(std::vector<double>& out) {
  if (cfg_.proposal == ProposalKind::Lattice) {
    const auto sites = static_cast<std::uint64_t>(ipow(static_cast<double>(cfg_.lattice_sites), window_.dim()));
    const Point p = lattice_site(window_, cfg_.lattice_sites, rng_.index(sites));
    std::copy(p.begin(), p.end(), out.begin());
    return;
  }
  const double h = window_.half_side();
  for (double& x : out) x = rng_.uniform(-h, h);
}

bool McmcChain::lattice_occupied(std::span<const double> pos, std::size_t self) const {
  const double probe = std::min(0.25 * window_.side() / static_cast<double>(cfg_.lattice_sites), index_.cell_width());
  bool hit = false;
  index_.visit_ball(pos, probe, [&](std::size_t id, std::span<const double>, double) { hit = hit || id != self; });
  return hit;
}

// Energy change of moving `id` from `from` to `to`; leaves the point at `to`.
double McmcChain::propose_delta(std::size_t id, std::span<const double> from, std::span<const double> to,
                                bool& forbidden) {
  const double r = V_.radius();
  forbidden = false;
  if (spec_.convention == Convention::Periodic && V_.is_plain_strauss()) {
    std::size_t before = 0;
    std::size_t after = 0;
    index_.visit_ball(from, r, [&](std::size_t j, std::span<const double>, double) { before += j != id; });
    index_.visit_ball(to, r, [&](std::size_t j, std::span<const double>, double) { after += j != id; });
    index_.relocate(id, to);
    return std::log(1.0 / V_.gamma()) * (static_cast<double>(after) - static_cast<double>(before));
  }
  if (spec_.convention == Convention::Periodic && V_.is_hard_core()) {
    index_.visit_ball(to, r, [&](std::size_t j, std::span<const double>, double) { forbidden = forbidden || j != id; });
    index_.relocate(id, to);
    return 0.0;
  }
  affected_.clear();
  index_.visit_ball(from, r, [&](std::size_t j, std::span<const double>, double) { if (j != id) affected_.push_back(j); });
  index_.visit_ball(to, r, [&](std::size_t j, std::span<const double>, double) { if (j != id) affected_.push_back(j); });
  std::sort(affected_.begin(), affected_.end());
  affected_.erase(std::unique(affected_.begin(), affected_.end()), affected_.end());

  auto total = [&](std::span<const double> pos) {
    Energy e = local_energy(id, pos) + outside_energy(pos);
    for (std::size_t j : affected_) e += local_energy(j, index_.point(j));
    return e;
  };
  const Energy before = total(from);
  index_.relocate(id, to);
  const Energy after = total(to);
  if (after.infinite) {
    if (!V_.is_hard_core()) throw Error(ErrorCode::NonFiniteEnergy, "non-hard-core model produced infinite energy");
    forbidden = true;
    return 0.0;
  }
  if (before.infinite) return -HUGE_VAL;
  const double delta = after.value - before.value;
  if (!std::isfinite(delta)) throw Error(ErrorCode::NonFiniteEnergy, "energy difference is not finite");
  return delta;
}

bool McmcChain::step() {
  ++proposals_;
  const std::size_t id = rng_.index(size());
  std::vector<double> from(point(id).begin(), point(id).end());
  propose_position(scratch_);
  // Drawn on every proposal so the stream does not depend on the sign of a
  // rounded energy difference.
  const double u = rng_.uniform();
  if (cfg_.proposal == ProposalKind::Lattice && lattice_occupied(scratch_, id)) return false;
  bool forbidden = false;
  const double delta = propose_delta(id, from, scratch_, forbidden);
  const bool accept = !forbidden && (delta <= 0.0 || u < std::exp(-cfg_.beta * delta));
  if (!accept) {
    index_.relocate(id, from);
    return false;
  }
  ++accepted_;
  return true;
}

void McmcChain::sweep(std::size_t count) {
  const std::size_t n = size();
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t k = 0; k < n; ++k) step();
  }
}

void mcmc_canonical(const InteractionModel& V, const HamiltonianSpec& spec, const TorusWindow& w,
                    const McmcConfig& cfg, RngStream& rng, const McmcObserver& observer) {
  McmcChain chain(V, spec, w, cfg, rng);
  chain.sweep(cfg.burn_in_sweeps);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    if (s > 0) chain.sweep(cfg.thinning_sweeps);
    observer(s, chain);
  }
}

std::vector<Configuration> mcmc_canonical(const InteractionModel& V, const HamiltonianSpec& spec,
                                          const TorusWindow& w, const McmcConfig& cfg, RngStream& rng) {
  std::vector<Configuration> out;
  out.reserve(cfg.samples);
  mcmc_canonical(V, spec, w, cfg, rng, [&out](std::size_t, const McmcChain& chain) { out.push_back(chain.configuration()); });
  return out;
}

}  // namespace gibbs
