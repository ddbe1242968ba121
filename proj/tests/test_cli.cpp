#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = fs::path(NTSYM_SOURCE_DIR) / "configs";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ntsym_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  json summary(const std::string& out, const std::string& name) const {
    return json::parse(slurp(path(out) / name));
  }

  /// Runs the binary; stdout and stderr land in `stdout_` / `stderr_`.
  int run(const std::string& args) {
    const auto o = path("stdout.txt"), e = path("stderr.txt");
    const std::string cmd = std::string("\"") + NTSYM_CLI_BINARY + "\" " + args + " >\"" + o.string() + "\" 2>\"" +
                            e.string() + "\"";
    const int status = std::system(cmd.c_str());
    stdout_ = slurp(o);
    stderr_ = slurp(e);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  int run(const std::string& command, const fs::path& config, const std::string& out, const std::string& extra = "") {
    return run(command + " --config \"" + config.string() + "\" --out \"" + path(out).string() + "\" " + extra);
  }

  fs::path dir_;
  std::string stdout_, stderr_;
};

}  // namespace

TEST_F(Cli, PressureOfLog3Potential) {
  ASSERT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "out"), 0) << stderr_;
  const auto s = summary("out", "pressure_summary.json");
  EXPECT_NEAR(s["estimate"]["liminf_bracket"].get<double>(), std::log(3.0), 1e-12);
  EXPECT_NEAR(s["estimate"]["limsup_bracket"].get<double>(), std::log(3.0), 1e-12);
  EXPECT_EQ(s["command"], "pressure");
  EXPECT_TRUE(s["critical_s"]["bowen"]["determined"].get<bool>());
  EXPECT_NE(stdout_.find("pressure bracket"), std::string::npos);

  const auto csv = slurp(path("out") / "pressure.csv");
  EXPECT_EQ(csv.rfind("# command=pressure config_hash=", 0), 0u);
  EXPECT_NE(csv.find("\nn,s_n,tail_inf,tail_sup\n"), std::string::npos);
  const auto manifest = json::parse(slurp(path("out") / "run.json"));
  EXPECT_EQ(manifest["config_hash"], s["config_hash"]);
  EXPECT_EQ(manifest["exit_code"], 0);
}

TEST_F(Cli, EntropyOfFullTwoShift) {
  const auto cfg = write("e.toml", "[space]\nperiod = [2]\n[run]\nn_hi = 32\n");
  ASSERT_EQ(run("entropy", cfg, "out"), 0) << stderr_;
  const auto s = summary("out", "entropy_summary.json");
  EXPECT_NEAR(s["estimate"]["liminf_bracket"].get<double>(), std::log(2.0), 1e-12);
  EXPECT_NEAR(s["estimate"]["limsup_bracket"].get<double>(), std::log(2.0), 1e-12);
  EXPECT_TRUE(fs::exists(path("out") / "entropy.csv"));
}

TEST_F(Cli, MalformedConfigNamesTheKey) {
  const auto cfg = write("bad.toml", "[space]\nperiod = [2]\n[run]\nn_hi = \"abc\"\n");
  EXPECT_EQ(run("pressure", cfg, "out"), 2);
  EXPECT_NE(stderr_.find("run.n_hi"), std::string::npos) << stderr_;

  const auto syntax = write("syntax.toml", "[space\nperiod = [2]\n");
  EXPECT_EQ(run("pressure", syntax, "out2"), 2);
  EXPECT_NE(stderr_.find("config error"), std::string::npos);

  const auto unknown = write("unknown.toml", "[space]\nperiod = [2]\n[run]\nbogus = 1\n");
  EXPECT_EQ(run("pressure", unknown, "out3"), 2);
  EXPECT_NE(stderr_.find("bogus"), std::string::npos) << stderr_;
}

TEST_F(Cli, ZeroProbabilityIsAHypothesisViolation) {
  const auto cfg = write("p0.toml", "[space]\nperiod = [2]\n[measure]\nperiod = [[0.0, 1.0]]\n[run]\nseed = 1\n");
  EXPECT_EQ(run("measure", cfg, "out"), 4);
  EXPECT_NE(stderr_.find("hypothesis"), std::string::npos);
}

TEST_F(Cli, RandomizedCommandsNeedASeed) {
  const auto cfg = write("ns.toml", "[space]\nperiod = [2]\n[measure]\nperiod = [[0.5, 0.5]]\n");
  EXPECT_EQ(run("measure", cfg, "out"), 2);
  EXPECT_NE(stderr_.find("run.seed"), std::string::npos);
  EXPECT_EQ(run("measure", cfg, "out2", "--seed 3"), 0) << stderr_;
  EXPECT_EQ(summary("out2", "measure_summary.json")["seed"], 3);
}

TEST_F(Cli, MeasureLlnVerdict) {
  ASSERT_EQ(run("measure", kConfigs / "measure_lln.toml", "out"), 0) << stderr_;
  const auto s = summary("out", "measure_summary.json");
  EXPECT_EQ(s["lln"]["verdict"], "pass");
  EXPECT_EQ(s["lln"]["samples"], 1000);
  EXPECT_TRUE(fs::exists(path("out") / "samples.csv"));
}

TEST_F(Cli, EquilibriumVerdictPasses) {
  ASSERT_EQ(run("equilibrium", kConfigs / "equilibrium.toml", "out"), 0) << stderr_;
  const auto e = summary("out", "equilibrium_summary.json")["equilibrium"];
  EXPECT_EQ(e["verdict"], "pass");
  EXPECT_LE(e["identity_residual"].get<double>(), 1e-9);
  EXPECT_LE(e["gibbs_max_deviation"].get<double>(), 1e-9);
}

TEST_F(Cli, VerifyExitCodes) {
  EXPECT_EQ(run("verify", kConfigs / "verify.toml", "ok"), 0) << stderr_;
  const auto ok = summary("ok", "verify.json");
  EXPECT_TRUE(ok["all_pass"].get<bool>());
  EXPECT_FALSE(ok["properties"].empty());

  EXPECT_EQ(run("verify", kConfigs / "verify_fault.toml", "fault"), 1);
  const auto bad = summary("fault", "verify.json");
  EXPECT_FALSE(bad["all_pass"].get<bool>());
  EXPECT_FALSE(bad["properties"][0]["counterexample"].is_null());

  const auto empty = write("empty.toml", "[space]\nperiod = [2]\n[run]\nseed = 1\nsuite = []\n");
  EXPECT_EQ(run("verify", empty, "empty"), 2);
  EXPECT_NE(stderr_.find("run.suite"), std::string::npos);

  const auto typo = write("typo.toml", "[space]\nperiod = [2]\n[run]\nseed = 1\nfault = \"nope\"\n");
  EXPECT_EQ(run("verify", typo, "typo"), 2);
  EXPECT_NE(stderr_.find("run.fault"), std::string::npos);
}

TEST_F(Cli, CodeCommandReportsWithinBounds) {
  ASSERT_EQ(run("code", kConfigs / "code_interval.toml", "out"), 0) << stderr_;
  const auto s = summary("out", "code_summary.json");
  EXPECT_LE(s["coding"]["max_residual"].get<double>(), 1e-9);
  EXPECT_LE(s["coding"]["max_roundtrip_over_bound"].get<double>(), 1.0);
  EXPECT_FALSE(s["expansiveness"]["counterexample"].get<bool>());

  ASSERT_EQ(run("code", kConfigs / "code_shift.toml", "shift"), 0) << stderr_;
  EXPECT_EQ(summary("shift", "code_summary.json")["expansiveness"]["index_differs_from_meet"], 0);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns) {
  for (const char* out : {"a", "b"}) ASSERT_EQ(run("measure", kConfigs / "measure_lln.toml", out), 0) << stderr_;
  for (const char* f : {"measure.csv", "samples.csv", "measure_summary.json", "run.json"})
    EXPECT_EQ(slurp(path("a") / f), slurp(path("b") / f)) << f;
}

TEST_F(Cli, MismatchedReplayIsRefused) {
  ASSERT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "out"), 0);
  EXPECT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "out"), 0) << "same config replays";
  const auto other = write("other.toml", "[space]\nperiod = [3]\n[run]\nn_hi = 16\n");
  EXPECT_EQ(run("pressure", other, "out"), 2);
  EXPECT_NE(stderr_.find("mismatched replay"), std::string::npos);
}

TEST_F(Cli, OverridesChangeTheRun) {
  ASSERT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "w", "--window 4..20"), 0) << stderr_;
  const auto w = summary("w", "pressure_summary.json");
  EXPECT_EQ(w["estimate"]["n_lo"], 4);
  EXPECT_EQ(w["estimate"]["n_hi"], 20);

  ASSERT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "d", "--depth 8"), 0) << stderr_;
  EXPECT_EQ(summary("d", "pressure_summary.json")["critical_s"]["bowen"]["depth_max"], 8);

  EXPECT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "x", "--window 5..2"), 2);
  EXPECT_NE(stderr_.find("--window"), std::string::npos);
  EXPECT_EQ(run("pressure", kConfigs / "pressure_log3.toml", "y", "--depth 1"), 2);
}
