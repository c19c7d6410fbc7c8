#include "gibbs/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbs/couplings.hpp"
#include "gibbs/diagnostics.hpp"
#include "gibbs/error.hpp"
#include "gibbs/estimation.hpp"
#include "gibbs/hamiltonian.hpp"
#include "gibbs/numeric.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/samplers.hpp"

namespace gibbs::cli {

using nlohmann::json;

const std::map<std::string, std::string>& default_config() {
  static const std::map<std::string, std::string> defaults = {
      {"lambda", "1"},
      {"d", "2"},
      {"n", "100"},
      {"n_ladder", "8,16,32,64,128,256,512,1024,2048,4096"},
      {"model.kind", ""},
      {"model.gamma", "1"},
      {"model.r", "0.5"},
      {"model.R", "0.3"},
      {"model.k", "2"},
      {"model.phi", "constant"},
      {"model.c", "1"},
      {"model.s_cap", "0"},
      {"score.kind", "neighbor-count"},
      {"score.r", "0.5"},
      {"score.k", "2"},
      {"score.m", "2"},
      {"score.c", "1"},
      {"score.threshold", "inf"},
      {"score.direction", "le"},
      {"bc.kind", "periodic"},
      {"bc.points_file", ""},
      {"mcmc.burn_in", "200"},
      {"mcmc.thinning", "10"},
      {"mcmc.samples", "100"},
      {"samples", "100000"},
      {"replicas", "16"},
      {"ti.beta_nodes", "21"},
      {"method", "auto"},
      {"profile.task", "partition"},
      {"eps", "0.1"},
      {"delta", "0.1"},
      {"b", "auto"},
      {"trials", "1000"},
      {"seed", "1"},
      {"stream", "0"},
      {"output", "."},
  };
  return defaults;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void mismatch(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorCode::TypeMismatch, "key '" + key + "' expects " + want + ", got '" + value + "'");
}

[[noreturn]] void violated(const std::string& what) { throw Error(ErrorCode::ConstraintViolated, what); }

double as_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) mismatch(key, v, "a real number");
  return out;
}

std::uint64_t as_uint(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) mismatch(key, v, "a nonnegative integer");
  return out;
}

template <class T, class F>
std::vector<T> as_list(const std::string& key, const std::string& v, F parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse(key, item));
  }
  return out;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return true;
  }
  return false;
}

bool needs_model(const ExperimentConfig& c) {
  if (c.command == "stirling") return false;
  if (c.command == "convergence" && c.profile_task == "stirling") return false;
  return true;
}

bool uses_ladder(const ExperimentConfig& c) { return c.command == "stirling" || c.command == "convergence"; }

double model_radius(const ExperimentConfig& c) {
  return c.model_kind == "hardcore" || c.model_kind == "truncated-hardcore" ? c.R : c.model_r;
}

void validate(ExperimentConfig& c) {
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) violated("lambda must be positive and finite");
  if (c.d < 2 || c.d > 8) violated("d must lie in [2, 8]");
  if (c.n < 1) violated("n must be >= 1");
  for (std::size_t k = 0; k < c.n_ladder.size(); ++k) {
    if (c.n_ladder[k] < 1) violated("n_ladder entries must be >= 1");
    if (k > 0 && c.n_ladder[k] <= c.n_ladder[k - 1]) violated("n_ladder must increase strictly");
  }
  if (uses_ladder(c) && c.n_ladder.empty()) violated("n_ladder must not be empty");
  if (!one_of(c.bc_kind, {"periodic", "boundary1", "boundary2"})) violated("bc.kind must be periodic, boundary1 or boundary2");
  if (!one_of(c.method, {"auto", "naive", "ti"})) violated("method must be auto, naive or ti");
  if (!one_of(c.profile_task, {"partition", "tail", "stirling"})) violated("profile.task must be partition, tail or stirling");
  if (!one_of(c.direction, {"le", "lt", "gt"})) violated("score.direction must be le, lt or gt");
  if (!one_of(c.score_kind, {"neighbor-count", "tuple", "indicator", "constant"})) {
    violated("score.kind must be neighbor-count, tuple, indicator or constant");
  }
  if (!one_of(c.phi, {"constant", "clique"})) violated("model.phi must be constant or clique");
  if (!(c.eps > 0.0 && c.eps < 1.0)) violated("eps must lie in (0,1)");
  if (!(c.delta >= 0.0 && c.delta < 1.0)) violated("delta must lie in [0,1)");
  if (c.b && *c.b < 2) violated("b must be >= 2 or auto");
  if (c.thinning < 1 || c.burn_in < 1) violated("mcmc.burn_in and mcmc.thinning must be >= 1");
  if (c.mcmc_samples < 1 || c.replicas < 1) violated("mcmc.samples and replicas must be >= 1");
  if (c.beta_nodes < 2) violated("ti.beta_nodes must be >= 2");
  if (c.score_k < 2 || c.score_k > 4) violated("score.k must lie in {2,3,4}");
  if (!(c.score_r > 0.0)) violated("score.r must be positive");

  if (!needs_model(c)) return;
  if (c.model_kind.empty()) violated("model.kind is required");
  if (!one_of(c.model_kind, {"strauss", "kwise", "hardcore", "truncated-hardcore"})) {
    violated("model.kind must be strauss, kwise, hardcore or truncated-hardcore");
  }
  if (c.model_kind == "strauss" && !(c.gamma > 0.0 && c.gamma <= 1.0)) violated("model.gamma must lie in (0,1]");
  if (c.model_kind == "kwise" && (c.k < 2 || c.k > 4)) violated("model.k must lie in {2,3,4}");
  if (c.model_kind == "kwise" && !(c.phi_c >= 0.0)) violated("model.c must be >= 0");
  if (c.model_kind == "truncated-hardcore" && !(c.s_cap >= 0.0)) violated("model.s_cap must be >= 0");
  const double r = model_radius(c);
  if (!(r > 0.0) || !std::isfinite(r)) violated("interaction radius must be positive");

  std::vector<std::size_t> sizes = uses_ladder(c) ? c.n_ladder : std::vector<std::size_t>{c.n};
  for (std::size_t n : sizes) {
    const TorusWindow w(c.d, c.lambda, n);
    if (c.model_kind == "hardcore") {
      const double packing = c.lambda * unit_ball_volume(c.d) * std::pow(c.R, c.d);
      if (!(packing < 1.0)) {
        violated("hard-core intensity assumption lambda * v_d * R^d < 1 violated (value " + std::to_string(packing) + ")");
      }
    }
    if (2.0 * r >= w.side()) {
      violated("interaction radius too large: 2r = " + std::to_string(2.0 * r) + " >= w_n = " + std::to_string(w.side()));
    }
    if (c.command == "tail" || (c.command == "convergence" && c.profile_task == "tail")) {
      if (2.0 * c.score_r >= w.side()) violated("score radius too large for the window (2r >= w_n)");
    }
  }
}

ExperimentConfig typed(const std::string& command, const std::map<std::string, std::string>& raw) {
  ExperimentConfig c;
  c.command = command;
  c.raw = raw;
  auto get = [&raw](const char* key) { return raw.at(key); };
  auto num = [&](const char* key) { return as_double(key, get(key)); };
  auto uint = [&](const char* key) { return as_uint(key, get(key)); };
  auto sint = [&](const char* key) {
    const std::uint64_t v = uint(key);
    if (v > 1000000) mismatch(key, get(key), "a small integer");
    return static_cast<int>(v);
  };
  c.lambda = num("lambda");
  c.d = sint("d");
  c.n = uint("n");
  c.n_ladder = as_list<std::size_t>("n_ladder", get("n_ladder"), as_uint);
  c.model_kind = trim(get("model.kind"));
  c.gamma = num("model.gamma");
  c.model_r = num("model.r");
  c.R = num("model.R");
  c.k = sint("model.k");
  c.phi = trim(get("model.phi"));
  c.phi_c = num("model.c");
  c.s_cap = num("model.s_cap");
  c.score_kind = trim(get("score.kind"));
  c.score_r = num("score.r");
  c.score_k = sint("score.k");
  c.score_m = sint("score.m");
  c.score_c = num("score.c");
  c.thresholds = as_list<double>("score.threshold", get("score.threshold"), as_double);
  c.direction = trim(get("score.direction"));
  c.bc_kind = trim(get("bc.kind"));
  c.bc_points_file = trim(get("bc.points_file"));
  c.burn_in = uint("mcmc.burn_in");
  c.thinning = uint("mcmc.thinning");
  c.mcmc_samples = uint("mcmc.samples");
  c.samples = uint("samples");
  c.replicas = uint("replicas");
  c.beta_nodes = uint("ti.beta_nodes");
  c.method = trim(get("method"));
  c.profile_task = trim(get("profile.task"));
  c.eps = num("eps");
  c.delta = num("delta");
  const std::string b = trim(get("b"));
  if (b != "auto") c.b = uint("b");
  c.trials = uint("trials");
  c.seed = uint("seed");
  c.stream = uint("stream");
  c.output = trim(get("output"));
  if (c.output.empty()) c.output = ".";
  validate(c);
  return c;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::TypeMismatch, path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!default_config().contains(key)) throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& command, const std::map<std::string, std::string>& file_entries,
                              const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> raw = default_config();
  for (const auto* layer : {&file_entries, &overrides}) {
    for (const auto& [key, value] : *layer) {
      if (!raw.contains(key)) throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
      raw[key] = value;
    }
  }
  return typed(command, raw);
}

ExperimentConfig parse_config(const std::string& command, const std::optional<std::string>& path,
                              const std::map<std::string, std::string>& overrides) {
  return parse_config(command, path ? read_config_file(*path) : std::map<std::string, std::string>{}, overrides);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# command = " << cfg.command << "\n";
  for (const auto& [key, value] : cfg.raw) out << key << " = " << value << "\n";
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

InteractionModel make_model(const ExperimentConfig& c) {
  if (c.model_kind == "strauss") return InteractionModel::strauss(c.gamma, c.model_r);
  if (c.model_kind == "kwise") {
    return InteractionModel::kwise(c.k, c.model_r, c.phi == "clique" ? TuplePotential::Clique : TuplePotential::Constant,
                                   c.phi_c);
  }
  if (c.model_kind == "hardcore") return InteractionModel::hard_core(c.R);
  return InteractionModel::truncated_hard_core(c.R, c.s_cap);
}

ScoreModel make_score(const ExperimentConfig& c) {
  if (c.score_kind == "neighbor-count") return ScoreModel::neighbor_count(c.score_r);
  if (c.score_kind == "tuple") {
    return ScoreModel::tuple(c.score_k, c.score_r, c.phi == "clique" ? TuplePotential::Clique : TuplePotential::Constant,
                             c.score_c);
  }
  if (c.score_kind == "indicator") return ScoreModel::indicator(c.score_r, c.score_m);
  return ScoreModel::constant(c.score_c);
}

std::vector<Point> read_points_csv(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open points file '" + path + "'");
  std::vector<Point> pts;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("x0", 0) == 0) continue;
    }
    Point p = as_list<double>("bc.points_file", line, as_double);
    if (p.size() < static_cast<std::size_t>(d)) throw Error(ErrorCode::TypeMismatch, "points file row has too few columns");
    p.resize(static_cast<std::size_t>(d));
    pts.push_back(std::move(p));
  }
  return pts;
}

HamiltonianSpec make_spec(const ExperimentConfig& c, const TorusWindow& w, double r) {
  if (c.bc_kind == "periodic") return HamiltonianSpec::periodic();
  const std::vector<Point> pts = c.bc_points_file.empty() ? std::vector<Point>{} : read_points_csv(c.bc_points_file, c.d);
  BoundaryCondition bc(w, pts, r);
  return c.bc_kind == "boundary1" ? HamiltonianSpec::boundary1(bc) : HamiltonianSpec::boundary2(bc);
}

McmcConfig make_mcmc(const ExperimentConfig& c) {
  McmcConfig m;
  m.burn_in_sweeps = c.burn_in;
  m.thinning_sweeps = c.thinning;
  m.samples = c.mcmc_samples;
  return m;
}

TiOptions make_ti(const ExperimentConfig& c) {
  TiOptions t;
  t.betas = chebyshev_beta_grid(c.beta_nodes);
  t.mcmc = make_mcmc(c);
  t.replicas = c.replicas;
  return t;
}

std::vector<double> thresholds_for(const ExperimentConfig& c) {
  return c.thresholds.empty() ? std::vector<double>{std::numeric_limits<double>::infinity()} : c.thresholds;
}

TailDirection direction_for(const ExperimentConfig& c) {
  if (c.direction == "lt") return TailDirection::Less;
  if (c.direction == "gt") return TailDirection::Greater;
  return TailDirection::LessEqual;
}

json constants_json(const RConstants& k) {
  return {{"K_r", k.K_r}, {"n_r", k.n_r}, {"A_r", k.A_r}, {"r", k.r}, {"overridden", k.overridden}};
}

struct Outputs {
  std::string csv;
  json report = json::object();
  std::optional<RConstants> constants;
  std::map<std::string, std::string> extra_files;
  int exit_code = 0;
};

const char* kProfileHeader = "n,estimate,std_error,samples,method\n";

std::string profile_row(std::size_t n, const Estimate& e) {
  return std::to_string(n) + "," + fmt(e.value) + "," + fmt(e.std_error) + "," + std::to_string(e.n_samples) + "," +
         e.method + "\n";
}

std::string points_csv(const Configuration& omega) {
  std::ostringstream out;
  for (int a = 0; a < omega.dim(); ++a) out << (a ? "," : "") << "x" << a;
  out << "\n";
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const auto p = omega.point(i);
    for (std::size_t a = 0; a < p.size(); ++a) out << (a ? "," : "") << fmt(p[a]);
    out << "\n";
  }
  return out.str();
}

Outputs cmd_sample(const ExperimentConfig& c, RngStream& rng) {
  const InteractionModel V = make_model(c);
  const TorusWindow w(c.d, c.lambda, c.n);
  const HamiltonianSpec spec = make_spec(c, w, V.radius());
  Outputs out;
  std::vector<double> pairs;
  std::size_t hc_bad = 0;
  std::optional<Configuration> last;
  double acceptance = 1.0;
  auto record = [&](const Configuration& omega) {
    pairs.push_back(static_cast<double>(pair_count_Sr(omega, V.radius())));
    if (V.is_hard_core()) hc_bad += hc_violations(omega, V.radius()).count > 0;
    last = omega;
  };
  if (interaction_is_trivial(V) && spec.convention == Convention::Periodic) {
    for (std::size_t s = 0; s < c.mcmc_samples; ++s) record(sample_binomial(w, rng));
  } else {
    mcmc_canonical(V, spec, w, make_mcmc(c), rng, [&](std::size_t, const McmcChain& chain) {
      record(chain.configuration());
      acceptance = chain.acceptance_rate();
    });
  }
  NeumaierSum mean;
  for (double p : pairs) mean += p;
  out.csv = points_csv(*last);
  out.report = {{"samples", pairs.size()},
                {"acceptance_rate", acceptance},
                {"mean_pair_count", mean.value() / static_cast<double>(pairs.size())},
                {"pair_count_lag1_autocorrelation", lag1_autocorrelation(pairs)},
                {"hard_core_violating_samples", hc_bad}};
  if (hc_bad > 0) out.exit_code = 3;
  return out;
}

json partition_json(const PartitionEstimate& p) {
  auto est = [](const Estimate& e) {
    return json{{"value", num_or_null(e.value)}, {"std_error", e.std_error}, {"n_samples", e.n_samples}, {"method", e.method}};
  };
  json j = {{"log_z_tilde", est(p.log_z_tilde)},
            {"normalized_log_z_tilde", est(p.normalized)},
            {"log_z", est(p.log_z)},
            {"normalized_log_z", est(p.normalized_z)},
            {"nonzero_fraction", p.nonzero_fraction},
            {"quadrature_error", p.quadrature_error},
            {"max_lag1_autocorrelation", p.max_lag1_autocorrelation}};
  if (p.coarse_normalized) j["coarse_normalized_log_z_tilde"] = *p.coarse_normalized;
  return j;
}

Outputs cmd_free_energy(const ExperimentConfig& c, RngStream& rng) {
  const InteractionModel V = make_model(c);
  const TorusWindow w(c.d, c.lambda, c.n);
  const HamiltonianSpec spec = make_spec(c, w, V.radius());
  const bool naive = c.method == "naive" || (c.method == "auto" && (V.is_hard_core() || interaction_is_trivial(V)));
  const PartitionEstimate p = naive ? estimate_log_partition_naive(V, spec, w, c.samples, rng, c.replicas)
                                    : estimate_log_partition_ti(V, spec, w, make_ti(c), rng);
  Outputs out;
  out.csv = std::string(kProfileHeader) + profile_row(c.n, p.normalized);
  out.report = partition_json(p);
  return out;
}

Outputs cmd_tail(const ExperimentConfig& c, RngStream& rng) {
  const InteractionModel V = make_model(c);
  const TorusWindow w(c.d, c.lambda, c.n);
  const HamiltonianSpec spec = make_spec(c, w, V.radius());
  TailOptions opt;
  opt.thresholds = thresholds_for(c);
  opt.direction = direction_for(c);
  opt.samples = c.samples;
  opt.mcmc = make_mcmc(c);
  opt.replicas = c.replicas;
  const std::vector<ScoreModel> scores(opt.thresholds.size(), make_score(c));
  const TailEstimate t = estimate_tail_logprob(V, spec, scores, w, opt, rng);
  Outputs out;
  out.csv = std::string(kProfileHeader) + profile_row(c.n, t.normalized);
  out.report = {{"hits", t.hits}, {"total", t.total}, {"normalized_log_prob", t.normalized.value},
                {"std_error", t.normalized.std_error}};
  return out;
}

RConstants checked_constants(const ExperimentConfig& c, const TorusWindow& w, double r, std::size_t& b) {
  const RConstants k = derive_r_constants(c.lambda, c.d, r);
  b = c.b ? *c.b : static_cast<std::size_t>(k.K_r) + 1;
  if (b <= k.K_r) throw Error(ErrorCode::InvalidArgument, "b must exceed K_r = " + std::to_string(k.K_r));
  if (w.point_budget() < k.n_r) {
    throw Error(ErrorCode::WindowTooSmall, "n = " + std::to_string(w.point_budget()) + " is below n_r = " +
                                               std::to_string(k.n_r) + " for r = " + fmt(r));
  }
  return k;
}

std::string coupling_dump(const ResampleCoupling& cp, const DenseReport& dense) {
  std::ostringstream out;
  const int d = cp.base.dim();
  for (int a = 0; a < d; ++a) out << "x" << a << ",";
  out << "u_mark,replaced,dense\n";
  for (std::size_t i = 0; i < cp.base.size(); ++i) {
    const auto p = cp.base.point(i);
    for (double x : p) out << fmt(x) << ",";
    out << fmt(cp.marks[i]) << "," << (cp.replaced(i) ? 1 : 0) << "," << (dense.is_dense[i] ? 1 : 0) << "\n";
  }
  return out.str();
}

Outputs cmd_coupling_verify(const ExperimentConfig& c, RngStream& rng) {
  const InteractionModel V = make_model(c);
  if (V.is_hard_core()) {
    throw Error(ErrorCode::InvalidArgument, "coupling-verify needs a finite interaction (not hardcore)");
  }
  const TorusWindow w(c.d, c.lambda, c.n);
  std::size_t b = 0;
  const RConstants k = checked_constants(c, w, V.radius(), b);
  const double M_b = *V.cardinality_bound(b);
  const InteractionModel bounded = V.capped(M_b);
  const ScoreModel score = make_score(c);
  const bool score_local = score.radius() <= V.radius();

  Outputs out;
  out.constants = k;
  std::ostringstream csv;
  csv << "trial,N_r,N_2r,s_n,bound_log,clause_i_lhs,clause_i_rhs,clause_ii_lhs,clause_ii_rhs,partner_dense,pass\n";
  std::size_t violations = 0;
  std::size_t skipped = 0;
  std::size_t checked = 0;
  double min_slack = HUGE_VAL;
  for (std::size_t t = 0; t < c.trials; ++t) {
    RngStream local = rng.child(t);
    const Configuration base = sample_binomial(w, local);
    const DenseReport dense = count_b_dense(base, k.r, b);
    const SparseCubeSet cubes = sparse_cubes(base, k);
    bool ok = static_cast<double>(cubes.s_n) >= static_cast<double>(c.n) * k.A_r;
    if (dense.count >= cubes.s_n) {
      ++skipped;
      if (!ok) ++violations;
      continue;
    }
    const ResampleCoupling cp = build_resample_coupling_given_E(base, c.eps, b, k, local);
    if (t == 0) out.extra_files["coupling-verify-points.csv"] = coupling_dump(cp, dense);
    const EventReport ev = detect_event_E_move(cp, b, k.r, k);
    ok = ok && ev.holds;
    const TrajectoryCheck bounded_check = trajectory_bound_check(cp, bounded, k, b);
    const TrajectoryCheck trunc_check = trajectory_bound_check(cp, V, k, b);
    ok = ok && bounded_check.pass() && trunc_check.pass();
    if (score_local) ok = ok && trajectory_bound_check(cp, score, k, b).pass();
    const std::size_t partner_dense = count_b_dense(cp.partner(), k.r, b).count;
    ok = ok && partner_dense == 0;
    min_slack = std::min({min_slack, bounded_check.slack(), trunc_check.slack()});
    ++checked;
    violations += !ok;
    csv << t << "," << dense.count << "," << bounded_check.N_2r << "," << cubes.s_n << ","
        << fmt(event_E_probability_bound(dense.count, cubes.s_n, c.eps, c.n, k.r, c.lambda, c.d)) << ","
        << fmt(bounded_check.bounded_lhs) << "," << fmt(bounded_check.bounded_rhs) << ","
        << fmt(trunc_check.truncated_lhs) << "," << fmt(trunc_check.truncated_rhs) << "," << partner_dense << ","
        << (ok ? 1 : 0) << "\n";
  }
  out.csv = csv.str();
  out.report = {{"trials", c.trials},   {"checked", checked}, {"skipped_dense_exceeds_cubes", skipped},
                {"violations", violations}, {"b", b},          {"M_b", M_b},
                {"min_slack", num_or_null(min_slack)}};
  if (violations > 0) out.exit_code = 3;
  return out;
}

Outputs cmd_dense_check(const ExperimentConfig& c, RngStream& rng) {
  const InteractionModel V = make_model(c);
  const TorusWindow w(c.d, c.lambda, c.n);
  std::size_t b = 0;
  const RConstants k = checked_constants(c, w, V.radius(), b);
  Outputs out;
  out.constants = k;
  std::ostringstream csv;
  csv << "trial,n,lambda,d,r,b,N_r,N_2r,s_n,A_r,K_r,n_r,bound_log,event_E\n";
  std::size_t violations = 0;
  std::size_t events = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    RngStream local = rng.child(t);
    const Configuration base = sample_binomial(w, local);
    const DenseReport dr = count_b_dense(base, k.r, b);
    const DenseReport d2 = count_b_dense(base, 2.0 * k.r, b);
    const SparseCubeSet cubes = sparse_cubes(base, k);
    const double bound = dr.count < cubes.s_n
                             ? event_E_probability_bound(dr.count, cubes.s_n, c.eps, c.n, k.r, c.lambda, c.d)
                             : -HUGE_VAL;
    const ResampleCoupling cp = build_resample_coupling(base, c.eps, local);
    const bool event = detect_event_E_move(cp, b, k.r, k).holds;
    bool ok = static_cast<double>(cubes.s_n) >= static_cast<double>(c.n) * k.A_r && dr.count <= d2.count;
    if (event) {
      ++events;
      ok = ok && count_b_dense(cp.partner(), k.r, b).count == 0;
    }
    violations += !ok;
    json rep = {{"n", c.n},       {"lambda", c.lambda}, {"d", c.d},         {"r", k.r},     {"b", b},
                {"N_r", dr.count}, {"N_2r", d2.count},  {"s_n", cubes.s_n}, {"A_r", k.A_r}, {"K_r", k.K_r},
                {"n_r", k.n_r},   {"bound_log", num_or_null(bound)}, {"event_E", event}};
    if (t == 0) out.report["report"] = rep;
    csv << t << "," << c.n << "," << fmt(c.lambda) << "," << c.d << "," << fmt(k.r) << "," << b << "," << dr.count
        << "," << d2.count << "," << cubes.s_n << "," << fmt(k.A_r) << "," << k.K_r << "," << k.n_r << ","
        << fmt(bound) << "," << (event ? 1 : 0) << "\n";
  }
  out.csv = csv.str();
  out.report["trials"] = c.trials;
  out.report["events"] = events;
  out.report["violations"] = violations;
  if (violations > 0) out.exit_code = 3;
  return out;
}

Outputs cmd_boundary_check(const ExperimentConfig& c, RngStream& rng) {
  const InteractionModel V = make_model(c);
  const TorusWindow w(c.d, c.lambda, c.n);
  const std::vector<Point> pts = c.bc_points_file.empty() ? std::vector<Point>{} : read_points_csv(c.bc_points_file, c.d);
  const BoundaryCondition bc(w, pts, V.radius());
  const VariantGapSummary s = hamiltonian_variant_gap(V, bc, w, c.eps, c.samples, rng, c.replicas);
  Outputs out;
  std::ostringstream csv;
  csv << "samples,eligible,c,max_gap1,cap1,max_gap2,cap2,violations1,violations2,sharp_violations\n";
  csv << s.samples << "," << s.eligible << "," << fmt(s.c) << "," << fmt(s.max_gap1) << "," << fmt(s.cap1) << ","
      << fmt(s.max_gap2) << "," << fmt(s.cap2) << "," << s.violations1 << "," << s.violations2 << ","
      << s.sharp_violations << "\n";
  out.csv = csv.str();
  out.report = {{"samples", s.samples},         {"eligible", s.eligible},       {"c", s.c},
                {"c_declared", s.c_declared},   {"max_gap1", s.max_gap1},       {"cap1", s.cap1},
                {"max_gap2", s.max_gap2},       {"cap2", s.cap2},               {"violations1", s.violations1},
                {"violations2", s.violations2}, {"sharp_violations", s.sharp_violations},
                {"boundary_points", bc.size()}};
  if (s.violations1 + s.violations2 + s.sharp_violations > 0) out.exit_code = 3;
  return out;
}

Outputs profile_outputs(const ConvergenceProfile& p) {
  Outputs out;
  std::string csv = kProfileHeader;
  for (const auto& r : p.rungs) csv += profile_row(r.n, r.estimate);
  out.csv = csv;
  out.report = {{"deltas", p.deltas}, {"trend_statistic", p.trend_statistic}, {"shrinking", p.shrinking}};
  return out;
}

Outputs cmd_stirling(const ExperimentConfig& c, RngStream& rng) {
  return profile_outputs(convergence_profile(c.n_ladder, c.lambda, c.d, stirling_rung_estimator(), rng));
}

Outputs cmd_convergence(const ExperimentConfig& c, RngStream& rng) {
  if (c.profile_task == "stirling") return cmd_stirling(c, rng);
  const InteractionModel V = make_model(c);
  RungEstimator est;
  if (c.profile_task == "partition") {
    const PartitionMethod m = c.method == "naive" ? PartitionMethod::Naive
                              : c.method == "ti"  ? PartitionMethod::ThermodynamicIntegration
                                                  : PartitionMethod::Auto;
    est = partition_rung_estimator(V, m, c.samples, make_ti(c));
  } else {
    TailOptions opt;
    opt.thresholds = thresholds_for(c);
    opt.direction = direction_for(c);
    opt.samples = c.samples;
    opt.mcmc = make_mcmc(c);
    opt.replicas = c.replicas;
    const std::vector<ScoreModel> scores(opt.thresholds.size(), make_score(c));
    est = [V, opt, scores](const TorusWindow& w, RngStream& r) {
      return estimate_tail_logprob(V, HamiltonianSpec::periodic(), scores, w, opt, r).normalized;
    };
  }
  return profile_outputs(convergence_profile(c.n_ladder, c.lambda, c.d, est, rng));
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownKey:
    case ErrorCode::TypeMismatch:
    case ErrorCode::ConstraintViolated:
    case ErrorCode::IntensityAssumption:
    case ErrorCode::WindowTooSmall:
    case ErrorCode::RadiusTooLarge:
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingBoundaryCondition:
    case ErrorCode::UnsupportedBoundaryModel:
    case ErrorCode::PointOutsideWindow:
    case ErrorCode::DuplicatePoint:
    case ErrorCode::Io:
      return 1;
    default:
      return 2;
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  f << text;
}

int dispatch(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  RngStream rng(c.seed, c.stream);
  Outputs out;
  if (c.command == "sample") out = cmd_sample(c, rng);
  else if (c.command == "free-energy") out = cmd_free_energy(c, rng);
  else if (c.command == "tail") out = cmd_tail(c, rng);
  else if (c.command == "coupling-verify") out = cmd_coupling_verify(c, rng);
  else if (c.command == "dense-check") out = cmd_dense_check(c, rng);
  else if (c.command == "boundary-check") out = cmd_boundary_check(c, rng);
  else if (c.command == "stirling") out = cmd_stirling(c, rng);
  else out = cmd_convergence(c, rng);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  const std::string config_text = render_config(c);
  write_file(dir / (c.command + ".config"), config_text);
  write_file(dir / (c.command + ".csv"), out.csv);
  for (const auto& [name, text] : out.extra_files) write_file(dir / name, text);

  json sidecar = {{"command", c.command},
                  {"config_hash", hex(fnv1a(config_text))},
                  {"seed", c.seed},
                  {"stream", c.stream},
                  {"wall_time_seconds", wall},
                  {"threads", replica_threads()},
                  {"exit_code", out.exit_code},
                  {"result", out.report}};
  if (needs_model(c)) {
    const RConstants k = out.constants ? *out.constants : derive_r_constants(c.lambda, c.d, model_radius(c));
    sidecar["constants"] = constants_json(k);
  }
  write_file(dir / (c.command + ".json"), sidecar.dump(2) + "\n");
  if (out.exit_code == 3) std::cerr << c.command << ": invariant violation, see " << (dir / (c.command + ".json")) << "\n";
  return out.exit_code;
}

struct FlagSpec {
  const char* flag;
  std::vector<const char*> keys;
  const char* help;
};

const std::vector<FlagSpec>& flag_specs() {
  static const std::vector<FlagSpec> specs = {
      {"--lambda", {"lambda"}, "intensity"},
      {"--d", {"d"}, "dimension"},
      {"--n", {"n"}, "point budget"},
      {"--n-ladder", {"n_ladder"}, "comma-separated increasing n values"},
      {"--model", {"model.kind"}, "strauss | kwise | hardcore | truncated-hardcore"},
      {"--gamma", {"model.gamma"}, "Strauss gamma in (0,1]"},
      {"--r", {"model.r", "score.r"}, "interaction and score radius"},
      {"--R", {"model.R"}, "hard-core radius"},
      {"--k", {"model.k"}, "tuple order for kwise"},
      {"--phi", {"model.phi"}, "constant | clique"},
      {"--c", {"model.c"}, "tuple potential value"},
      {"--s-cap", {"model.s_cap"}, "truncated hard-core value"},
      {"--score", {"score.kind"}, "neighbor-count | tuple | indicator | constant"},
      {"--score-r", {"score.r"}, "score radius"},
      {"--threshold", {"score.threshold"}, "tail threshold(s)"},
      {"--direction", {"score.direction"}, "le | lt | gt"},
      {"--bc", {"bc.kind"}, "periodic | boundary1 | boundary2"},
      {"--bc-points", {"bc.points_file"}, "CSV of boundary points"},
      {"--burn-in", {"mcmc.burn_in"}, "burn-in sweeps"},
      {"--thinning", {"mcmc.thinning"}, "sweeps between retained samples"},
      {"--mcmc-samples", {"mcmc.samples"}, "retained samples per chain"},
      {"--samples", {"samples"}, "independent draws"},
      {"--replicas", {"replicas"}, "independent replicas"},
      {"--beta-nodes", {"ti.beta_nodes"}, "thermodynamic-integration nodes"},
      {"--method", {"method"}, "auto | naive | ti"},
      {"--task", {"profile.task"}, "partition | tail | stirling"},
      {"--eps", {"eps"}, "resampling probability epsilon"},
      {"--delta", {"delta"}, "thinning probability delta"},
      {"--b", {"b"}, "density threshold, or auto for K_r + 1"},
      {"--trials", {"trials"}, "number of trials"},
      {"--seed", {"seed"}, "random seed"},
      {"--stream", {"stream"}, "random stream id"},
      {"--out", {"output"}, "output directory"},
  };
  return specs;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Canonical Gibbs point processes on periodic windows: sampling, estimation and bound checks"};
  app.require_subcommand(1);
  std::map<std::string, std::string> overrides;
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"sample", "MCMC samples from the canonical Gibbs process"},
      {"free-energy", "normalized log partition function"},
      {"tail", "normalized log probability of a score tail"},
      {"coupling-verify", "trajectory bounds on couplings conditioned on the move event"},
      {"dense-check", "dense points, sparse cubes and event bounds"},
      {"boundary-check", "periodic versus boundary Hamiltonian gaps"},
      {"stirling", "exact normalized log P(Poisson(n) = n) over a ladder"},
      {"convergence", "estimates over an n-ladder with trend statistics"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option_function<std::string>("--config", [&](const std::string& p) { config_path = p; },
                                          "key = value config file");
    sub->add_option("--set", sets, "extra key=value override");
    for (const auto& spec : flag_specs()) {
      const auto keys = spec.keys;
      sub->add_option_function<std::string>(
          spec.flag, [&overrides, keys](const std::string& v) {
            for (const char* k : keys) overrides[k] = v;
          },
          spec.help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<ExperimentConfig> cfg;
  try {
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::TypeMismatch, "--set expects key=value, got '" + s + "'");
      overrides[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    cfg = parse_config(command, config_path, overrides);
  } catch (const Error& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 1;
  }
  try {
    return dispatch(*cfg);
  } catch (const Error& e) {
    std::cerr << command << ": " << e.what() << "\n";
    // A constraint failing after validation is a violated invariant.
    return e.code() == ErrorCode::ConstraintViolated ? 3 : exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("gibbs-ldp");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace gibbs::cli
