#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gibbs/cell_index.hpp"
#include "gibbs/models.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/torus.hpp"

namespace gibbs {

/// `count` i.i.d. uniform points in the window.
Configuration sample_uniform_points(const TorusWindow& w, std::size_t count, RngStream& rng);
/// Binomial point process: exactly n uniform points.
Configuration sample_binomial(const TorusWindow& w, RngStream& rng);
/// Poisson point process with intensity lambda: Poisson(n) uniform points.
Configuration sample_poisson(const TorusWindow& w, RngStream& rng);

enum class ProposalKind { Uniform, Lattice };

struct McmcConfig {
  std::size_t burn_in_sweeps = 200;
  std::size_t thinning_sweeps = 10;
  std::size_t samples = 100;
  /// Inverse temperature scaling the Hamiltonian.
  double beta = 1.0;
  ProposalKind proposal = ProposalKind::Uniform;
  /// Sites per axis for lattice proposals.
  std::size_t lattice_sites = 0;
  std::optional<Configuration> initial;
};

/// Centre of lattice site `site` (row-major, axis 0 fastest) on an L^d grid.
Point lattice_site(const TorusWindow& w, std::size_t sites_per_axis, std::size_t site);

/// Throws IntensityAssumption unless lambda * v_d * R^d < 1.
void check_hard_core_intensity(const TorusWindow& w, double R);

/// Dart throwing with up to 100 n proposals, then a lattice of spacing > R.
Configuration hard_core_start(const TorusWindow& w, double R, RngStream& rng);

/// Single-point uniform-relocation Metropolis chain for the canonical
/// ensemble, acceptance min(1, exp(-beta * dH)). One sweep is n proposals.
class McmcChain {
 public:
  McmcChain(const InteractionModel& V, const HamiltonianSpec& spec, const TorusWindow& w, const McmcConfig& cfg,
            RngStream& rng);

  bool step();
  void sweep(std::size_t count = 1);

  const TorusWindow& window() const { return window_; }
  std::size_t size() const { return index_.size(); }
  std::span<const double> point(std::size_t id) const { return index_.point(id); }
  Configuration configuration() const;

  std::size_t proposals() const { return proposals_; }
  std::size_t accepted() const { return accepted_; }
  double acceptance_rate() const;

 private:
  Energy local_energy(std::size_t id, std::span<const double> pos) const;
  Energy outside_energy(std::span<const double> pos) const;
  double propose_delta(std::size_t id, std::span<const double> from, std::span<const double> to, bool& forbidden);
  void propose_position(std::vector<double>& out);
  bool lattice_occupied(std::span<const double> pos, std::size_t self) const;

  InteractionModel V_;
  HamiltonianSpec spec_;
  TorusWindow window_;
  McmcConfig cfg_;
  RngStream& rng_;
  CellIndex index_;
  std::optional<CellIndex> outside_;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
  std::vector<double> scratch_;
  std::vector<std::size_t> affected_;
};

/// Called once per retained sample.
using McmcObserver = std::function<void(std::size_t sample, const McmcChain& chain)>;

void mcmc_canonical(const InteractionModel& V, const HamiltonianSpec& spec, const TorusWindow& w,
                    const McmcConfig& cfg, RngStream& rng, const McmcObserver& observer);
std::vector<Configuration> mcmc_canonical(const InteractionModel& V, const HamiltonianSpec& spec,
                                          const TorusWindow& w, const McmcConfig& cfg, RngStream& rng);

}  // namespace gibbs
