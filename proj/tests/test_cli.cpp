#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orrlab/orrlab.hpp"

using namespace orrlab;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // stdout and stderr interleaved
};

std::string cli_path() {
  const char* p = std::getenv("ORRLAB_CLI");
  return p ? p : ORRLAB_CLI_PATH;
}

fs::path configs_dir() {
  const char* p = std::getenv("ORRLAB_CONFIGS");
  return fs::path(p ? p : ORRLAB_CONFIG_DIR);
}

CliResult run_cli(const std::string& args) {
  const std::string cmd = "'" + cli_path() + "' " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("orrlab_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Small finite-channel run with a random initial field.
  json small_config(const std::string& out) const {
    return json{{"schema_version", 1},
                {"profile", {{"name", "couette_bump"}, {"epsilon", 0.001}, {"center", 0.5}, {"width", 0.2}}},
                {"channel", {{"kind", "finite"}, {"n_grid", 65}}},
                {"modes", {1, 2}},
                {"initial", {{"name", "random"}, {"count", 4}}},
                {"time", {{"dt", 0.05}, {"t_end", 5.0}, {"snapshot_every", 0.25}}},
                {"fits", {{"decay_window", {1.0, 5.0}}}},
                {"output", {{"dir", (dir_ / out).string()}}},
                {"seed", 99}};
  }

  fs::path write(const std::string& name, const json& j) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, NegativeTimeStepIsASingleLineConfigError) {
  json cfg = small_config("neg");
  cfg["time"]["dt"] = -0.1;
  const auto r = run_cli("run '" + write("neg.json", cfg).string() + "'");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_EQ(line_count(r.out), 1u) << r.out;
  EXPECT_EQ(r.out.rfind("orrlab: ", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("time.dt"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(dir_ / "neg"));
}

TEST_F(Cli, AllViolationsAreReportedTogether) {
  json cfg = small_config("many");
  cfg["time"]["dt"] = 0.0;
  cfg["channel"]["n_grid"] = 3;
  cfg["weights"] = {{"c_exp", 2.0}};
  const auto r = run_cli("run '" + write("many.json", cfg).string() + "'");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_EQ(line_count(r.out), 1u) << r.out;
  EXPECT_NE(r.out.find("time.dt"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("n_grid"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c_exp"), std::string::npos) << r.out;
}

TEST_F(Cli, UnknownKeyIsRejected) {
  json cfg = small_config("unk");
  cfg["time"]["dtt"] = 0.1;
  const auto r = run_cli("run '" + write("unk.json", cfg).string() + "'");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("dtt"), std::string::npos) << r.out;
}

TEST_F(Cli, MissingFileIsAnError) {
  const auto r = run_cli("run '" + (dir_ / "nope.json").string() + "'");
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(line_count(r.out), 1u) << r.out;
}

TEST_F(Cli, RunsAreBitIdenticalAndReplayable) {
  const auto a = run_cli("run '" + write("a.json", small_config("a")).string() + "'");
  ASSERT_EQ(a.code, 0) << a.out;
  const auto b = run_cli("run '" + write("b.json", small_config("b")).string() + "'");
  ASSERT_EQ(b.code, 0) << b.out;
  const std::string sa = slurp(dir_ / "a" / "series.csv");
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(dir_ / "b" / "series.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "summary.json"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "snapshots" / "omega_m0_s000000.csv"));

  json mat = read_json_file((dir_ / "a" / "config.materialized.json").string());
  mat["output"]["dir"] = (dir_ / "replay").string();
  const auto c = run_cli("run '" + write("replay.json", mat).string() + "'");
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_EQ(sa, slurp(dir_ / "replay" / "series.csv"));
}

TEST_F(Cli, SeriesRoundTripsThroughCsv) {
  const RunConfig cfg = parse_config(small_config("rt"));
  const auto out = execute(cfg, true);
  const Series back = read_series_csv((dir_ / "rt" / "series.csv").string());
  ASSERT_EQ(back.columns, out.series.columns);
  ASSERT_EQ(back.rows.size(), out.series.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) EXPECT_EQ(back.rows[i], out.series.rows[i]);
  EXPECT_TRUE(missing_columns(back, cfg).empty());
}

TEST_F(Cli, EmptySweepWritesHeaderOnly) {
  const auto cfg = write("base.json", small_config("sw"));
  const auto r = run_cli("sweep '" + cfg.string() + "' --param profile.epsilon --values ''");
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(dir_ / "sw" / "sweep.csv");
  EXPECT_EQ(line_count(csv), 1u) << csv;
  EXPECT_EQ(csv.rfind("value,margin,", 0), 0u) << csv;
}

TEST_F(Cli, SweepRunsOneCellPerValue) {
  json base = small_config("sw2");
  base["modes"] = {1};
  const auto cfg = write("base.json", base);
  const auto r = run_cli("sweep '" + cfg.string() + "' --param profile.epsilon --values 0,0.001,0.002");
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(dir_ / "sw2" / "sweep.csv");
  EXPECT_EQ(line_count(csv), 4u) << csv;
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir_ / "sw2" / ("cell_" + std::to_string(i)) / "series.csv"));
  EXPECT_NE(csv.find("\n0,0,"), std::string::npos) << csv;  // zero amplitude has zero margin
}

TEST_F(Cli, SweepRejectsUnaddressableParameter) {
  const auto cfg = write("base.json", small_config("bad"));
  const auto r = run_cli("sweep '" + cfg.string() + "' --param profile.nonsense --values 1");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("not addressable"), std::string::npos) << r.out;
  EXPECT_THROW(set_parameter(json{{"a", {{"b", 1}}}}, "a", 2), ConfigError);
  EXPECT_EQ(set_parameter(json{{"a", {{"b", 1}}}}, "a.b", 2)["a"]["b"], 2);
}

TEST_F(Cli, FitRejectsZeroSeries) {
  json cfg = small_config("zero");
  cfg["initial"] = {{"name", "constant"}, {"amplitude", 0.0}};
  const auto run = run_cli("run '" + write("zero.json", cfg).string() + "'");
  ASSERT_EQ(run.code, 0) << run.out;
  const auto r = run_cli("fit '" + (dir_ / "zero").string() + "'");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("nonpositive"), std::string::npos) << r.out;
}

TEST_F(Cli, FitWindowAndGevreyIndexCanBeChanged) {
  json cfg = read_json_file((configs_dir() / "couette.json").string());
  cfg["output"]["dir"] = (dir_ / "couette").string();
  const auto run = run_cli("run '" + write("couette.json", cfg).string() + "'");
  ASSERT_EQ(run.code, 0) << run.out;
  const json s10 = read_json_file((dir_ / "couette" / "summary.json").string());
  EXPECT_NEAR(s10["decay_alpha_psi"].get<double>(), -2.0, 0.05);
  EXPECT_NEAR(s10["decay_alpha_dpsi"].get<double>(), -1.0, 0.05);

  const auto r = run_cli("fit '" + (dir_ / "couette").string() + "' --window 20,100 --s 2");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("decay_alpha_psi"), std::string::npos);
  const json s20 = read_json_file((dir_ / "couette" / "summary.json").string());
  EXPECT_NEAR(s20["decay_alpha_psi"].get<double>(), s10["decay_alpha_psi"].get<double>(), 0.05);
  EXPECT_EQ(s20["fit_window"][0].get<double>(), 20.0);
  EXPECT_EQ(s20["gevrey_C_of_t"]["s"].get<double>(), 2.0);
  EXPECT_EQ(s20["status"], s10["status"]);
}

TEST_F(Cli, FitListsEveryMissingColumn) {
  const RunConfig cfg = parse_config(small_config("mc"));
  Series s;
  s.columns = {"t", "m0_omega_l2"};
  s.rows = {{0.0, 1.0}};
  const auto missing = missing_columns(s, cfg);
  EXPECT_EQ(missing.size(), series_columns(cfg).size() - 2);
  EXPECT_EQ(missing.front(), "m0_omega_h0");
  try {
    fit_summary(s, cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    for (const auto& col : missing) EXPECT_NE(msg.find(col), std::string::npos) << col;
  }
}

TEST_F(Cli, UnknownSubcommandFails) {
  EXPECT_NE(run_cli("frobnicate").code, 0);
  EXPECT_NE(run_cli("").code, 0);
}

TEST(Verify, QuickChecksPass) {
  for (const auto& r : quick_checks()) EXPECT_TRUE(r.pass) << format_check(r);
}

TEST(Verify, BrokenWeightSignIsDetected) {
  VerifyOptions opt;
  opt.weight_sign = -1.0;
  std::vector<std::string> failed;
  for (const auto& r : quick_checks(opt))
    if (!r.pass) failed.push_back(r.name);
  ASSERT_FALSE(failed.empty());
  auto has = [&](const std::string& needle) {
    for (const auto& n : failed)
      if (n.find(needle) != std::string::npos) return true;
    return false;
  };
  EXPECT_TRUE(has("arctan weights non-increasing"));
  EXPECT_TRUE(has("Couette energy ladder non-increasing"));
}

TEST(Verify, CliReportsQuickChecks) {
  const auto r = run_cli("verify");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0 check(s) failed"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Formatting, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
    EXPECT_EQ(parse_double(format_double(x)), x);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_THROW(parse_double("1.5x"), Error);
}

TEST(Config, MaterializedConfigParsesBack) {
  const json j{{"schema_version", 1},
               {"profile", {{"name", "couette_sin"}, {"epsilon", 0.01}, {"phase", 1.5}}},
               {"channel", {{"kind", "infinite"}, {"n_grid", 129}}},
               {"modes", {1}},
               {"initial", {{"name", "gaussian"}}},
               {"time", {{"dt", 0.1}, {"t_end", 1.0}, {"snapshot_every", 0.5}}},
               {"output", {{"dir", "x"}}}};
  const RunConfig a = parse_config(j);
  EXPECT_EQ(a.channel.z_min, -10.0);
  EXPECT_EQ(a.channel.z_max, 10.0);
  const json once = to_json(a);
  EXPECT_EQ(to_json(parse_config(once)), once);
  json bad = j;
  bad["schema_version"] = 2;
  EXPECT_THROW(parse_config(bad), ConfigError);
}
