#include "gibbs/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gibbs/diagnostics.hpp"
#include "gibbs/error.hpp"
#include "gibbs/hamiltonian.hpp"
#include "gibbs/numeric.hpp"
#include "gibbs/parallel.hpp"

namespace gibbs {

namespace {

double sorted_sum(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  NeumaierSum acc;
  for (double x : xs) acc += x;
  return acc.value();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto k = static_cast<double>(xs.size());
  if (xs.empty()) return {};
  const double mean = sorted_sum(xs) / k;
  if (xs.size() < 2) return {mean, 0.0};
  std::vector<double> sq;
  sq.reserve(xs.size());
  for (double x : xs) sq.push_back((x - mean) * (x - mean));
  const double var = sorted_sum(std::move(sq)) / (k - 1.0);
  return {mean, std::sqrt(var / k)};
}

std::vector<std::size_t> split(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t k = 0; k < total % parts; ++k) ++out[k];
  return out;
}

bool nonnegative_model(const InteractionModel& V) { return V.offset() >= 0.0; }

void fill_partition(PartitionEstimate& out, const TorusWindow& w, const std::string& method) {
  const double scale = w.intensity() / static_cast<double>(w.point_budget());
  const double stirling = stirling_log_prob(w.point_budget(), w.intensity()).log_prob;
  out.log_z_tilde.method = method;
  out.normalized = {scale * out.log_z_tilde.value, scale * out.log_z_tilde.std_error, out.log_z_tilde.n_samples, method};
  out.log_z = {out.log_z_tilde.value + stirling, out.log_z_tilde.std_error, out.log_z_tilde.n_samples, method};
  out.normalized_z = {scale * out.log_z.value, scale * out.log_z.std_error, out.log_z.n_samples, method};
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  NeumaierSum acc;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) acc += 0.5 * (x[j + 1] - x[j]) * (y[j] + y[j + 1]);
  return acc.value();
}

}  // namespace

Estimate merge_replicas(std::vector<double> values, std::size_t n_samples, const std::string& method) {
  const MeanSe m = mean_and_se(std::move(values));
  return {m.mean, m.se, n_samples, method};
}

bool interaction_is_trivial(const InteractionModel& V) {
  if (V.cap() && *V.cap() == 0.0) return true;
  switch (V.kind()) {
    case InteractionKind::Strauss:
      return V.gamma() == 1.0;
    case InteractionKind::KWise:
      return V.phi_bound() == 0.0;
    case InteractionKind::TruncatedHardCore:
      return V.truncation() == 0.0;
    case InteractionKind::HardCore:
      return false;
  }
  return false;
}

double lag1_autocorrelation(const std::vector<double>& xs) {
  if (xs.size() < 3) return 0.0;
  NeumaierSum s;
  for (double x : xs) s += x;
  const double mean = s.value() / static_cast<double>(xs.size());
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    den += (xs[i] - mean) * (xs[i] - mean);
    if (i + 1 < xs.size()) num += (xs[i] - mean) * (xs[i + 1] - mean);
  }
  return den.value() > 0.0 ? num.value() / den.value() : 0.0;
}

PartitionEstimate estimate_log_partition_naive(const InteractionModel& V, const HamiltonianSpec& spec,
                                               const TorusWindow& w, std::size_t samples, RngStream& rng,
                                               std::size_t replicas) {
  if (samples < 1000) throw Error(ErrorCode::PreconditionViolated, "naive estimation needs at least 1000 samples");
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replica");
  validate_spec(spec, V);
  check_local_radius(w, V.radius());
  const auto sizes = split(samples, replicas);
  struct Part {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t nonzero = 0;
  };
  const auto parts = run_replicas<Part>(replicas, [&](std::size_t k) {
    RngStream local = rng.child(k);
    NeumaierSum acc;
    Part p;
    for (std::size_t s = 0; s < sizes[k]; ++s) {
      const Energy h = hamiltonian(spec, V, sample_binomial(w, local));
      const double weight = h.weight();
      acc += weight;
      p.nonzero += weight > 0.0;
    }
    p.sum = acc.value();
    p.count = sizes[k];
    return p;
  });
  std::vector<double> sums;
  std::vector<double> means;
  std::size_t nonzero = 0;
  for (const auto& p : parts) {
    sums.push_back(p.sum);
    means.push_back(p.sum / static_cast<double>(p.count));
    nonzero += p.nonzero;
  }
  const double mean = sorted_sum(sums) / static_cast<double>(samples);
  if (!(mean > 0.0)) throw Error(ErrorCode::AllZeroWeights, "every draw had infinite energy");
  const MeanSe between = mean_and_se(means);
  PartitionEstimate out;
  out.log_z_tilde = {std::log(mean), between.se / mean, samples, "naive"};
  out.nonzero_fraction = static_cast<double>(nonzero) / static_cast<double>(samples);
  if (nonnegative_model(V) && out.log_z_tilde.value > 0.0) {
    throw Error(ErrorCode::ConstraintViolated, "log Z~ > 0 for a nonnegative interaction");
  }
  fill_partition(out, w, "naive");
  return out;
}

std::vector<double> chebyshev_beta_grid(std::size_t nodes) {
  if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "beta grid needs at least two nodes");
  std::vector<double> out(nodes);
  const auto m = static_cast<double>(nodes - 1);
  for (std::size_t j = 0; j < nodes; ++j) out[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) / m));
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

PartitionEstimate estimate_log_partition_ti(const InteractionModel& V, const HamiltonianSpec& spec,
                                            const TorusWindow& w, const TiOptions& options, RngStream& rng) {
  if (V.is_hard_core()) throw Error(ErrorCode::NonFiniteEnergy, "thermodynamic integration needs finite V");
  const auto& betas = options.betas;
  if (betas.size() < 2 || betas.front() != 0.0 || betas.back() != 1.0 ||
      !std::is_sorted(betas.begin(), betas.end()) ||
      std::adjacent_find(betas.begin(), betas.end()) != betas.end()) {
    throw Error(ErrorCode::InvalidArgument, "beta grid must increase strictly from 0 to 1");
  }
  if (options.replicas < 1 || options.mcmc.samples < 1) {
    throw Error(ErrorCode::InvalidArgument, "need at least one replica and one sample per node");
  }
  validate_spec(spec, V);
  check_local_radius(w, V.radius());

  struct Part {
    std::vector<double> mean_energy;
    double max_rho = 0.0;
  };
  const auto parts = run_replicas<Part>(options.replicas, [&](std::size_t k) {
    RngStream replica = rng.child(k);
    Part p;
    for (std::size_t j = 0; j < betas.size(); ++j) {
      RngStream local = replica.child(j);
      std::vector<double> trace;
      trace.reserve(options.mcmc.samples);
      if (betas[j] == 0.0 || interaction_is_trivial(V)) {
        for (std::size_t s = 0; s < options.mcmc.samples; ++s) {
          trace.push_back(hamiltonian(spec, V, sample_binomial(w, local)).value);
        }
      } else {
        McmcConfig cfg = options.mcmc;
        cfg.beta = betas[j];
        mcmc_canonical(V, spec, w, cfg, local, [&](std::size_t, const McmcChain& chain) {
          const Energy h = hamiltonian(spec, V, chain.configuration());
          if (h.infinite) throw Error(ErrorCode::NonFiniteEnergy, "chain reached infinite energy");
          trace.push_back(h.value);
        });
      }
      NeumaierSum acc;
      for (double h : trace) acc += h;
      p.mean_energy.push_back(acc.value() / static_cast<double>(trace.size()));
      p.max_rho = std::max(p.max_rho, lag1_autocorrelation(trace));
    }
    return p;
  });

  const double scale = w.intensity() / static_cast<double>(w.point_budget());
  const bool nested = betas.size() >= 3 && betas.size() % 2 == 1;
  std::vector<double> coarse_betas;
  if (nested) {
    for (std::size_t j = 0; j < betas.size(); j += 2) coarse_betas.push_back(betas[j]);
  }
  std::vector<double> fine;
  std::vector<double> coarse;
  PartitionEstimate out;
  for (const auto& p : parts) {
    fine.push_back(-trapezoid(betas, p.mean_energy));
    if (nested) {
      std::vector<double> sub;
      for (std::size_t j = 0; j < betas.size(); j += 2) sub.push_back(p.mean_energy[j]);
      coarse.push_back(-trapezoid(coarse_betas, sub));
    }
    out.max_lag1_autocorrelation = std::max(out.max_lag1_autocorrelation, p.max_rho);
  }
  const std::size_t total = options.replicas * options.mcmc.samples * betas.size();
  out.log_z_tilde = merge_replicas(fine, total, "ti");
  if (nested) {
    const double c = mean_and_se(coarse).mean;
    out.coarse_normalized = scale * c;
    out.quadrature_error = scale * std::abs(out.log_z_tilde.value - c);
  }
  if (nonnegative_model(V) && out.log_z_tilde.value > 0.0) {
    throw Error(ErrorCode::ConstraintViolated, "log Z~ > 0 for a nonnegative interaction");
  }
  fill_partition(out, w, "ti");
  return out;
}

namespace {

bool in_tail(const std::vector<double>& xi, const std::vector<double>& a, TailDirection dir) {
  for (std::size_t j = 0; j < xi.size(); ++j) {
    switch (dir) {
      case TailDirection::LessEqual:
        if (!(xi[j] <= a[j])) return false;
        break;
      case TailDirection::Less:
        if (!(xi[j] < a[j])) return false;
        break;
      case TailDirection::Greater:
        if (!(xi[j] > a[j])) return false;
        break;
    }
  }
  return true;
}

}  // namespace

TailEstimate estimate_tail_logprob(const InteractionModel& V, const HamiltonianSpec& spec,
                                   const std::vector<ScoreModel>& scores, const TorusWindow& w,
                                   const TailOptions& options, RngStream& rng) {
  if (scores.empty() || scores.size() != options.thresholds.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one threshold per score");
  }
  for (double a : options.thresholds) {
    if (std::isnan(a)) throw Error(ErrorCode::InvalidArgument, "thresholds must not be NaN");
  }
  if (options.replicas < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replica");
  validate_spec(spec, V);
  check_local_radius(w, V.radius());
  const bool direct = interaction_is_trivial(V);
  const auto sizes = split(options.samples, options.replicas);

  struct Part {
    std::size_t hits = 0;
    std::size_t total = 0;
  };
  const auto parts = run_replicas<Part>(options.replicas, [&](std::size_t k) {
    RngStream local = rng.child(k);
    Part p;
    auto record = [&](const Configuration& omega) {
      p.hits += in_tail(score_average(scores, omega), options.thresholds, options.direction);
      ++p.total;
    };
    if (direct) {
      for (std::size_t s = 0; s < sizes[k]; ++s) record(sample_binomial(w, local));
    } else {
      mcmc_canonical(V, spec, w, options.mcmc, local,
                     [&](std::size_t, const McmcChain& chain) { record(chain.configuration()); });
    }
    return p;
  });

  TailEstimate out;
  std::vector<double> freqs;
  for (const auto& p : parts) {
    out.hits += p.hits;
    out.total += p.total;
    if (p.total > 0) freqs.push_back(static_cast<double>(p.hits) / static_cast<double>(p.total));
  }
  if (out.hits == 0) {
    throw Error(ErrorCode::ZeroHits, "no sample fell in the tail region (" + std::to_string(out.total) + " samples)");
  }
  const auto N = static_cast<double>(out.total);
  const double p = static_cast<double>(out.hits) / N;
  // Wilson interval at z = 1, mapped through log.
  const double denom = 1.0 + 1.0 / N;
  const double centre = (p + 0.5 / N) / denom;
  const double half = std::sqrt(p * (1.0 - p) / N + 0.25 / (N * N)) / denom;
  const double wilson = 0.5 * (std::log(centre + half) - std::log(std::max(centre - half, 1e-300)));
  const double between = freqs.size() > 1 ? mean_and_se(freqs).se / p : 0.0;
  const double scale = w.intensity() / static_cast<double>(w.point_budget());
  out.normalized = {scale * std::log(p), scale * std::max(wilson, between), out.total, direct ? "direct" : "mcmc"};
  return out;
}

ConvergenceProfile convergence_profile(const std::vector<std::size_t>& ladder, double lambda, int d,
                                       const RungEstimator& estimator, RngStream& rng) {
  if (ladder.empty()) throw Error(ErrorCode::InvalidArgument, "ladder is empty");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (ladder[k] <= ladder[k - 1]) throw Error(ErrorCode::InvalidArgument, "ladder must increase strictly");
  }
  ConvergenceProfile out;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    RngStream local = rng.child(k);
    out.rungs.push_back({ladder[k], estimator(TorusWindow(d, lambda, ladder[k]), local)});
  }
  for (std::size_t k = 1; k < out.rungs.size(); ++k) {
    out.deltas.push_back(out.rungs[k].estimate.value - out.rungs[k - 1].estimate.value);
  }
  const std::size_t m = out.deltas.size();
  const std::size_t first = m >= 3 ? m - 3 : 0;
  out.shrinking = m >= 2;
  for (std::size_t k = first; k < m; ++k) {
    out.trend_statistic = std::max(out.trend_statistic, std::abs(out.deltas[k]));
    if (k > first && !(std::abs(out.deltas[k]) < std::abs(out.deltas[k - 1]))) out.shrinking = false;
  }
  return out;
}

RungEstimator partition_rung_estimator(const InteractionModel& V, PartitionMethod method, std::size_t naive_samples,
                                       const TiOptions& ti) {
  if (method == PartitionMethod::Auto) {
    method = V.is_hard_core() || interaction_is_trivial(V) ? PartitionMethod::Naive
                                                           : PartitionMethod::ThermodynamicIntegration;
  }
  return [V, method, naive_samples, ti](const TorusWindow& w, RngStream& rng) {
    const HamiltonianSpec spec = HamiltonianSpec::periodic();
    if (method == PartitionMethod::Naive) {
      return estimate_log_partition_naive(V, spec, w, naive_samples, rng, ti.replicas).normalized;
    }
    return estimate_log_partition_ti(V, spec, w, ti, rng).normalized;
  };
}

RungEstimator stirling_rung_estimator() {
  return [](const TorusWindow& w, RngStream&) {
    return Estimate{stirling_log_prob(w.point_budget(), w.intensity()).normalized, 0.0, 0, "stirling"};
  };
}

VariantGapSummary hamiltonian_variant_gap(const InteractionModel& V, const BoundaryCondition& bc,
                                          const TorusWindow& w, double epsilon, std::size_t samples, RngStream& rng,
                                          std::size_t replicas) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replica");
  const auto spec1 = HamiltonianSpec::boundary1(bc);
  const auto spec2 = HamiltonianSpec::boundary2(bc);
  validate_spec(spec1, V);
  const auto sizes = split(samples, replicas);

  struct Record {
    double gap1;
    double gap2;
    std::size_t boundary;
    double local_max;
  };
  const auto parts = run_replicas<std::vector<Record>>(replicas, [&](std::size_t k) {
    RngStream local = rng.child(k);
    std::vector<Record> recs;
    recs.reserve(sizes[k]);
    for (std::size_t s = 0; s < sizes[k]; ++s) {
      const Configuration omega = sample_binomial(w, local);
      double local_max = 0.0;
      auto total = [&](const HamiltonianSpec& spec) {
        NeumaierSum acc;
        for (const auto& e : hamiltonian_terms(spec, V, omega)) {
          if (e.infinite) throw Error(ErrorCode::NonFiniteEnergy, "variant gap needs finite V");
          acc += e.value;
          local_max = std::max(local_max, e.value);
        }
        return acc.value();
      };
      const double h = total(HamiltonianSpec::periodic());
      const double h1 = total(spec1);
      const double h2 = total(spec2);
      recs.push_back({std::abs(h - h1), std::abs(h - h2), boundary_count(omega, V.radius()), local_max});
    }
    return recs;
  });

  VariantGapSummary out;
  out.epsilon = epsilon;
  out.samples = samples;
  if (const auto c = V.bound()) {
    out.c = *c;
    out.c_declared = true;
  } else {
    for (const auto& recs : parts) {
      for (const auto& r : recs) out.c = std::max(out.c, r.local_max);
    }
  }
  const double n_eps = static_cast<double>(w.point_budget()) * epsilon;
  out.cap1 = 2.0 * out.c * n_eps;
  out.cap2 = 3.0 * out.c * n_eps;
  for (const auto& recs : parts) {
    for (const auto& r : recs) {
      const double sharp = 2.0 * out.c * static_cast<double>(r.boundary);
      out.sharp_violations += (r.gap1 > sharp) + (r.gap2 > sharp);
      if (static_cast<double>(r.boundary) > n_eps) continue;
      ++out.eligible;
      out.max_gap1 = std::max(out.max_gap1, r.gap1);
      out.max_gap2 = std::max(out.max_gap2, r.gap2);
      out.violations1 += r.gap1 > out.cap1;
      out.violations2 += r.gap2 > out.cap2;
    }
  }
  return out;
}

}  // namespace gibbs
