#include "fluidnet/run.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <json.hpp>

#include "fluidnet/errors.h"
#include "fluidnet/presets.h"

namespace fluidnet {
namespace {

namespace fs = std::filesystem;

TEST(Run, OracleModes) {
  EXPECT_EQ(parse_oracle_mode("both"), OracleMode::kBoth);
  EXPECT_EQ(parse_oracle_mode("none"), OracleMode::kNone);
  EXPECT_THROW(parse_oracle_mode("fluid"), ConfigError);
}

TEST(Run, LoadPresetOrFile) {
  EXPECT_EQ(load_scenario("scenario2"), preset("scenario2"));
  fs::path p = fs::temp_directory_path() / "fluidnet_run_test.json";
  {
    std::ofstream out(p);
    out << serialize_scenario(preset("scenario8"));
  }
  EXPECT_EQ(load_scenario(p.string()), preset("scenario8"));
  fs::remove(p);
  EXPECT_THROW(load_scenario("/no/such/file.json"), ConfigError);
}

TEST(Run, Overrides) {
  RunOptions opt;
  opt.dt = 5e-5;
  opt.horizon = 2.0;
  opt.init = InitMode::kCold;
  Scenario s = apply_overrides(preset("scenario1"), opt);
  EXPECT_DOUBLE_EQ(s.run.dt, 5e-5);
  EXPECT_DOUBLE_EQ(s.run.horizon, 2.0);
  EXPECT_EQ(s.run.init, InitMode::kCold);
}

std::vector<std::string> header(const std::string& csv) {
  std::vector<std::string> cols;
  std::stringstream line(csv.substr(0, csv.find('\n')));
  std::string c;
  while (std::getline(line, c, ',')) cols.push_back(c);
  return cols;
}

TEST(Run, FluidCsvColumns) {
  Scenario s = preset("scenario8");
  s.run.horizon = 0.2;
  TraceSet tr = simulate(s, SimConfig::from(s));
  std::ostringstream out;
  write_fluid_csv(tr, out, 10);
  const std::string text = out.str();
  std::vector<std::string> cols = header(text);
  ASSERT_GE(cols.size(), 3u);
  EXPECT_EQ(cols[0], "time[s]");
  EXPECT_EQ(cols[1], "w_u1[pkt]");
  for (const char* c : {"pi_u1[pkt]", "q_b1[pkt]", "tau_b1[s]",
                        "out_b1_x1[pkt/s]", "cross_x1[pkt/s]"}) {
    EXPECT_NE(std::find(cols.begin(), cols.end(), c), cols.end()) << c;
  }
  // 0.2 s at 1e-4: 2001 ticks; stride 10 keeps 201 rows plus the header
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 202);
}

TEST(Run, ReportAndFiles) {
  fs::path dir = fs::temp_directory_path() / "fluidnet_run_report";
  fs::remove_all(dir);
  RunOptions opt;
  opt.oracle = OracleMode::kBoth;
  opt.out_dir = dir.string();
  opt.horizon = 6.0;
  RunReport r = run_scenario(preset("scenario7"), opt);
  EXPECT_TRUE(r.passed());
  ASSERT_NE(r.check("silence_u1"), nullptr);
  ASSERT_NE(r.metric("fluid_resume_u1"), nullptr);
  EXPECT_GT(r.metric("fluid_resume_u1")->value, 5.0);
  ASSERT_NE(r.metric("queue_rms_b1"), nullptr);
  for (const char* f : {"fluid.csv", "packet.csv", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "report.json");
  nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j["scenario"], "scenario7");
  EXPECT_EQ(j["checks"].size(), r.checks.size());
  fs::remove_all(dir);
}

TEST(Run, FastReportHasNoPacketRun) {
  RunOptions opt;
  opt.oracle = OracleMode::kBoth;
  opt.horizon = 2.0;
  RunReport r = run_scenario(preset("fast"), opt);
  const CheckResult* c = r.check("packet_oracle");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->status, CheckStatus::kNotApplicable);
}

TEST(Run, SquarewaveCounts) {
  Scenario s = preset("squarewave");
  s.run.horizon = 3.0;
  TraceSet tr = simulate(s, SimConfig::from(s));
  PeriodCounts pc = period_counts(tr, nullptr, 1.0);
  ASSERT_EQ(pc.fluid_in[0].size(), 2u);
  ASSERT_EQ(pc.fluid_in[0][0].size(), 3u);
  // each flow sends 0.55 c * 2 for half a period: 0.55 c packets per period
  const double c = tr.network.capacity(0);
  EXPECT_NEAR(pc.fluid_in[0][0][1], 0.55 * c, 1e-6 * c);
  EXPECT_NEAR(pc.fluid_in[0][1][1], 0.55 * c, 1e-6 * c);
  EXPECT_TRUE(pc.packet_out.empty());
}

}  // namespace
}  // namespace fluidnet
