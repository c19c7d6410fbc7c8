#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gibbs/cli.hpp"
#include "gibbs/diagnostics.hpp"
#include "gibbs/error.hpp"

using namespace gibbs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gibbs_ldp_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode parse_error(const std::map<std::string, std::string>& kv, const std::string& cmd = "free-energy") {
  try {
    cli::parse_config(cmd, std::map<std::string, std::string>{}, kv);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST(Config, DefaultsAndValidation) {
  const auto c = cli::parse_config("stirling", std::map<std::string, std::string>{}, {});
  EXPECT_EQ(c.n_ladder.front(), 8u);
  EXPECT_EQ(c.n_ladder.back(), 4096u);
  EXPECT_FALSE(c.b.has_value());
  EXPECT_EQ(parse_error({}), ErrorCode::ConstraintViolated);
  EXPECT_EQ(parse_error({{"model.kind", "strauss"}, {"model.gamma", "1.5"}}), ErrorCode::ConstraintViolated);
  EXPECT_EQ(parse_error({{"model.kind", "strauss"}, {"n", "two"}}), ErrorCode::TypeMismatch);
  EXPECT_EQ(parse_error({{"model.kind", "strauss"}, {"model.gamma", "0.5"}, {"n", "2"}, {"model.r", "0.8"}}),
            ErrorCode::ConstraintViolated);
  EXPECT_EQ(parse_error({{"model.kind", "kwise"}, {"model.k", "5"}}), ErrorCode::ConstraintViolated);
  EXPECT_EQ(parse_error({{"nonsense", "1"}}), ErrorCode::UnknownKey);
}

TEST(Config, HardCoreIntensityMessage) {
  try {
    cli::parse_config("free-energy", std::map<std::string, std::string>{},
                      {{"model.kind", "hardcore"}, {"model.R", "0.9"}, {"n", "2"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstraintViolated);
    EXPECT_NE(std::string(e.what()).find("intensity assumption"), std::string::npos);
  }
}

TEST(Config, FlagsOverrideFile) {
  const fs::path dir = scratch("override");
  {
    std::ofstream f(dir / "exp.cfg");
    f << "# comment line\nmodel.kind = strauss\nscore.r = 0.3   # trailing comment\nmodel.gamma = 0.5\n";
  }
  const std::string out = (dir / "out").string();
  const int rc = cli::run({"stirling", "--config", (dir / "exp.cfg").string(), "--r", "0.5", "--n-ladder", "10,100",
                           "--out", out});
  ASSERT_EQ(rc, 0);
  const std::string echo = slurp(fs::path(out) / "stirling.config");
  EXPECT_NE(echo.find("score.r = 0.5"), std::string::npos);
  EXPECT_NE(echo.find("model.kind = strauss"), std::string::npos);

  std::ofstream(dir / "bad.cfg") << "mystery = 3\n";
  EXPECT_EQ(cli::run({"stirling", "--config", (dir / "bad.cfg").string(), "--out", out}), 1);
}

TEST(Run, StirlingCsvMatchesLibrary) {
  const fs::path dir = scratch("stirling");
  ASSERT_EQ(cli::run({"stirling", "--n-ladder", "10,100,1000", "--lambda", "1", "--out", dir.string()}), 0);
  std::ifstream csv(dir / "stirling.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,estimate,std_error,samples,method");
  for (std::uint64_t n : {10ULL, 100ULL, 1000ULL}) {
    std::getline(csv, line);
    std::stringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    EXPECT_EQ(std::stoull(field), n);
    std::getline(row, field, ',');
    EXPECT_EQ(std::stod(field), stirling_log_prob(n).normalized);
  }
  const auto side = nlohmann::json::parse(slurp(dir / "stirling.json"));
  EXPECT_TRUE(side.contains("config_hash"));
  EXPECT_TRUE(side["result"]["shrinking"].get<bool>());
}

TEST(Run, ExitCodes) {
  const fs::path dir = scratch("codes");
  const std::string out = dir.string();
  EXPECT_EQ(cli::run({"free-energy", "--model", "hardcore", "--R", "0.9", "--lambda", "1", "--d", "2", "--n", "2",
                      "--out", out}),
            1);
  EXPECT_EQ(cli::run({"no-such-command"}), 1);
  // n = 64 is below n_r = 82 at r = 0.5.
  EXPECT_EQ(cli::run({"coupling-verify", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--n", "64", "--b",
                      "auto", "--eps", "0.1", "--trials", "10", "--seed", "7", "--out", out}),
            1);
  EXPECT_EQ(cli::run({"tail", "--model", "strauss", "--gamma", "1", "--r", "0.5", "--n", "20", "--samples", "1000",
                      "--threshold", "50", "--direction", "gt", "--out", out}),
            2);
}

TEST(Run, CouplingVerifyReportsNoViolations) {
  const fs::path dir = scratch("coupling");
  ASSERT_EQ(cli::run({"coupling-verify", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--n", "100", "--b",
                      "auto", "--eps", "0.1", "--trials", "20", "--seed", "7", "--out", dir.string()}),
            0);
  const auto side = nlohmann::json::parse(slurp(dir / "coupling-verify.json"));
  EXPECT_EQ(side["result"]["violations"].get<int>(), 0);
  EXPECT_EQ(side["constants"]["n_r"].get<int>(), 82);
  EXPECT_EQ(slurp(dir / "coupling-verify-points.csv").substr(0, 27), "x0,x1,u_mark,replaced,dense");
}

TEST(Run, DenseCheckReportKeys) {
  const fs::path dir = scratch("dense");
  ASSERT_EQ(cli::run({"dense-check", "--model", "strauss", "--gamma", "0.5", "--r", "0.1", "--n", "100", "--trials",
                      "5", "--out", dir.string()}),
            0);
  const auto rep = nlohmann::json::parse(slurp(dir / "dense-check.json"))["result"]["report"];
  for (const char* key : {"n", "lambda", "d", "r", "b", "N_r", "N_2r", "s_n", "A_r", "K_r", "n_r", "bound_log", "event_E"}) {
    EXPECT_TRUE(rep.contains(key)) << key;
  }
}

TEST(Run, ByteIdenticalReruns) {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  const std::vector<std::string> base = {"sample", "--model", "strauss", "--gamma", "0.5", "--r", "0.5",
                                         "--n", "30", "--burn-in", "5", "--thinning", "1", "--mcmc-samples", "3"};
  auto with_out = [&](const fs::path& p) {
    auto args = base;
    args.push_back("--out");
    args.push_back(p.string());
    return args;
  };
  ASSERT_EQ(cli::run(with_out(a)), 0);
  ASSERT_EQ(cli::run(with_out(b)), 0);
  EXPECT_EQ(slurp(a / "sample.csv"), slurp(b / "sample.csv"));
  EXPECT_EQ(slurp(a / "sample.config").size(), slurp(b / "sample.config").size());
  EXPECT_EQ(slurp(a / "sample.csv").substr(0, 6), "x0,x1\n");
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
