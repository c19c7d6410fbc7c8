#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gibbs::cli {

/// Fully resolved experiment configuration. `raw` holds every known key
/// (defaults included) as text and is what gets echoed to the output
/// directory; the typed fields are parsed from it.
struct ExperimentConfig {
  std::string command;
  std::map<std::string, std::string> raw;

  double lambda = 1.0;
  int d = 2;
  std::size_t n = 0;
  std::vector<std::size_t> n_ladder;

  std::string model_kind;
  double gamma = 1.0;
  double model_r = 0.0;
  double R = 0.0;
  int k = 2;
  std::string phi = "constant";
  double phi_c = 1.0;
  double s_cap = 0.0;

  std::string score_kind;
  double score_r = 0.0;
  int score_k = 2;
  int score_m = 2;
  double score_c = 1.0;
  std::vector<double> thresholds;
  std::string direction = "le";

  std::string bc_kind = "periodic";
  std::string bc_points_file;

  std::size_t burn_in = 200;
  std::size_t thinning = 10;
  std::size_t mcmc_samples = 100;
  std::size_t samples = 100000;
  std::size_t replicas = 16;
  std::size_t beta_nodes = 21;
  std::string method = "auto";
  std::string profile_task = "partition";

  double eps = 0.1;
  double delta = 0.1;
  std::optional<std::size_t> b;  // empty means auto (K_r + 1)
  std::size_t trials = 1000;

  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::string output = ".";
};

/// Every accepted key with its default value.
const std::map<std::string, std::string>& default_config();

/// Reads `key = value` lines (# comments, blank lines ignored).
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Merges defaults, file entries and flag overrides (in that precedence
/// order) and validates. Throws gibbs::Error with UnknownKey, TypeMismatch
/// or ConstraintViolated.
ExperimentConfig parse_config(const std::string& command, const std::map<std::string, std::string>& file_entries,
                              const std::map<std::string, std::string>& overrides);
ExperimentConfig parse_config(const std::string& command, const std::optional<std::string>& path,
                              const std::map<std::string, std::string>& overrides);

/// Text echoed as `<command>.config`: one sorted `key = value` line per key.
std::string render_config(const ExperimentConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Entry point: 0 ok, 1 config error, 2 estimator failure, 3 invariant violation.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace gibbs::cli
