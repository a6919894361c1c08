#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using namespace bbqec::cli;
namespace fs = std::filesystem;

namespace {

struct RunOutput {
  int code;
  std::string out, err;
};

RunOutput invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bbqec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bbqec-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json read_json(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return json::parse(in);
  }

  std::string out() const { return dir_.string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, NoArgumentsPrintsUsage) {
  const RunOutput r = invoke({});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsUsageError) { EXPECT_EQ(invoke({"code", "build", "--frobnicate"}).code, kUsage); }

TEST_F(CliTest, UnknownPreset) {
  const RunOutput r = invoke({"--out", out(), "code", "build", "[[7,1,3]]"});
  EXPECT_EQ(r.code, kUnknownPreset);
  const json e = json::parse(r.err);
  EXPECT_EQ(e["error"]["kind"], "unknown_preset");
}

TEST_F(CliTest, MalformedConfig) {
  std::ofstream(dir_ / "bad.ini") << "[layout]\nrefine = perhaps\n";
  EXPECT_EQ(invoke({"--config", (dir_ / "bad.ini").string(), "code", "build"}).code, kBadConfig);
  std::ofstream(dir_ / "unknown.ini") << "[gate]\ncolour = blue\n";
  EXPECT_EQ(invoke({"--config", (dir_ / "unknown.ini").string(), "code", "build"}).code, kBadConfig);
  EXPECT_EQ(invoke({"--config", (dir_ / "missing.ini").string(), "code", "build"}).code, kBadConfig);
}

TEST_F(CliTest, InfeasibleLayoutRequest) {
  const RunOutput r = invoke({"--out", out(), "layout", "optimize", "[[72,12,6]]", "--dmax", "3"});
  EXPECT_EQ(r.code, kInfeasibleLayout);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "infeasible_layout");
}

TEST_F(CliTest, CodeCheck) {
  EXPECT_EQ(invoke({"--out", out(), "code", "check", "[[90,8,10]]"}).code, kOk);
  const json rep = read_json("code-check.json");
  EXPECT_EQ(rep["results"]["k"], 8);
  EXPECT_TRUE(rep["results"]["checks"]["ok"].get<bool>());
  EXPECT_EQ(rep["tool"], "bbqec");
  EXPECT_EQ(rep["config"]["code"]["preset"], "[[90,8,10]]");
}

TEST_F(CliTest, InlineCodeFromConfig) {
  std::ofstream(dir_ / "code.ini") << "[code]\nname = mine\nl = 6\nm = 6\na_terms = x3 y y2\nb_terms = y3 x x2\n"
                                      "n = 72\nk = 12\nd = 6\n";
  EXPECT_EQ(invoke({"--config", (dir_ / "code.ini").string(), "--out", out(), "code", "check"}).code, kOk);
  EXPECT_EQ(read_json("code-check.json")["results"]["k"], 12);
}

TEST_F(CliTest, LayoutOptimize72) {
  EXPECT_EQ(invoke({"--out", out(), "layout", "optimize", "[[72,12,6]]", "--r-search", "restricted"}).code, kOk);
  const json rep = read_json("layout-optimize.json");
  EXPECT_EQ(rep["results"]["dmax_squared"], 25);
  EXPECT_DOUBLE_EQ(rep["results"]["dmax"].get<double>(), 5.0);
  EXPECT_EQ(rep["results"]["positions"].size(), 144u);
  EXPECT_TRUE(fs::exists(dir_ / "layout-histogram.csv"));
}

TEST_F(CliTest, LayoutHistogramAndFold) {
  EXPECT_EQ(invoke({"--out", out(), "layout", "histogram", "144"}).code, kOk);
  const json h = read_json("layout-histogram.json")["results"];
  EXPECT_EQ(h["total"], 864);
  EXPECT_EQ(h["histogram"].size(), 17u);
  EXPECT_EQ(invoke({"--out", out(), "layout", "fold", "144"}).code, kOk);
  EXPECT_EQ(read_json("layout-fold.json")["results"]["folded"].size(), 144u);
}

TEST_F(CliTest, GateSimulateRow17) {
  EXPECT_EQ(invoke({"--out", out(), "gate", "simulate", "--row", "17"}).code, kOk);
  const json r = read_json("gate-simulate.json")["results"];
  EXPECT_NEAR(r["result"]["fidelity"].get<double>(), 0.9993, 1e-3);
  std::ifstream csv(dir_ / "gate-trace.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t_ns,omega_mhz,phi_rad,p_g,p_r,p_gg,p_gr,p_rr");
}

TEST_F(CliTest, GateOverridesAreApplied) {
  EXPECT_EQ(invoke({"--out", out(), "gate", "simulate", "--row", "17", "--omega", "0"}).code, kOk);
  EXPECT_NEAR(read_json("gate-simulate.json")["results"]["result"]["f_ave"].get<double>(), 0.4, 1e-9);
  EXPECT_EQ(invoke({"--out", out(), "gate", "simulate", "--row", "18"}).code, kUsage);
}

TEST_F(CliTest, ScheduleIsDeterministic) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(invoke({"--out", a.string(), "--seed", "3", "schedule", "--restarts", "2"}).code, kOk);
  ASSERT_EQ(invoke({"--out", b.string(), "--seed", "3", "schedule", "--restarts", "2"}).code, kOk);
  std::ifstream ia(a / "schedule.json"), ib(b / "schedule.json");
  const json ja = json::parse(ia), jb = json::parse(ib);
  EXPECT_EQ(ja["results"].dump(), jb["results"].dump());
  json ca = ja["config"], cb = jb["config"];
  ca["output"].erase("dir");
  cb["output"].erase("dir");
  EXPECT_EQ(ca.dump(), cb.dump());
  EXPECT_TRUE(ja["results"]["summary"]["certification"]["ok"].get<bool>());
}

TEST_F(CliTest, ScheduleFromLayoutFile) {
  ASSERT_EQ(invoke({"--out", out(), "--format", "json", "layout", "optimize", "72", "--layout-seed",
                    "x2y x5y5 x4y5 xy x3"})
                .code,
            kOk);
  const std::string layout = (dir_ / "layout-optimize.json").string();
  EXPECT_EQ(invoke({"--out", out(), "schedule", "--code", "72", "--layout", layout, "--restarts", "2"}).code, kOk);
  EXPECT_EQ(read_json("schedule.json")["results"]["code"], "[[72,12,6]]");
  // A layout for a different code does not place every qubit.
  EXPECT_EQ(invoke({"--out", out(), "schedule", "--code", "144", "--layout", layout}).code, kBadConfig);
}

TEST_F(CliTest, CycleTimeSweepCsv) {
  EXPECT_EQ(invoke({"--out", out(), "cycle-time", "sweep", "--restarts", "2", "--t-switch-max", "1",
                    "--t-switch-step", "0.5", "--op-meas", "0:0,10:10"})
                .code,
            kOk);
  std::ifstream csv(dir_ / "cycle-time-sweep.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t_switch_us,t_op_us,t_meas_us,total_ms");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST_F(CliTest, EnvironmentChoosesOutputDirectory) {
  const fs::path env_dir = dir_ / "from-env";
  ::setenv("BBQEC_OUT_DIR", env_dir.string().c_str(), 1);
  const int rc = invoke({"code", "build", "72"}).code;
  ::unsetenv("BBQEC_OUT_DIR");
  EXPECT_EQ(rc, kOk);
  EXPECT_TRUE(fs::exists(env_dir / "code-build.json"));
}

TEST(RunConfig, RoundTrip) {
  RunConfig a;
  a.seed = 99;
  a.jobs = 3;
  a.code.preset = "[[90,8,10]]";
  a.layout.seed = "x5 x9y x10 x6y2 x";
  a.layout.refine = false;
  a.gate.row = 4;
  a.gate.omega_mhz = 12.5;
  a.gate.weighting = "half-sum";
  a.timing.t_op_us = 170.0;
  a.sweep.op_meas = "1:2";
  a.constants.crosstalk_threshold = 0.02;
  a.formats = "json";
  RunConfig b;
  apply_config_text(b, to_config_text(a));
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(to_config_text(a), to_config_text(b));
  ASSERT_TRUE(b.gate.omega_mhz);
  EXPECT_EQ(*b.gate.omega_mhz, 12.5);
}

TEST(RunConfig, InlineComments) {
  RunConfig c;
  apply_config_text(c, "; leading comment\n[layout]\nr_search = full   ; auto | full | restricted\n"
                       "[run]\nseed = 12 # trailing\n");
  EXPECT_EQ(c.layout.r_search, "full");
  EXPECT_EQ(c.seed, 12u);
}

TEST(RunConfig, RejectsTopLevelKeys) {
  RunConfig c;
  EXPECT_THROW(apply_config_text(c, "seed = 3\n"), ConfigError);
}

TEST(RunConfig, DumpedConfigReloads) {
  const RunOutput dumped = invoke({"--seed", "5", "--jobs", "2", "--dump-config"});
  ASSERT_EQ(dumped.code, kOk);
  RunConfig c;
  apply_config_text(c, dumped.out);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.jobs, 2);
}

TEST(RunConfig, OpMeasParsing) {
  const auto v = parse_op_meas("0:0,170:500");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], (std::pair<double, double>{170.0, 500.0}));
  EXPECT_THROW(parse_op_meas("170"), ConfigError);
  EXPECT_THROW(parse_op_meas("a:b"), ConfigError);
}
