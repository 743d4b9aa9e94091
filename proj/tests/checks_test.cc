#include "fluidnet/checks.h"

#include <gtest/gtest.h>

#include "fluidnet/presets.h"

namespace fluidnet {
namespace {

TraceSet run(const std::string& name, double horizon) {
  Scenario s = preset(name);
  s.run.horizon = horizon;
  return simulate(s, SimConfig::from(s));
}

TEST(Checks, AllPassOnShortScenario1) {
  TraceSet tr = run("scenario1", 4.0);
  for (const CheckResult& c : run_checks(tr)) {
    EXPECT_TRUE(c.ok()) << c.name << " " << c.value << " " << c.detail;
  }
}

TEST(Checks, EveryCheckReportedOnce) {
  TraceSet tr = run("scenario7", 1.0);
  std::vector<CheckResult> r = run_checks(tr);
  std::vector<std::string> names;
  for (const CheckResult& c : r) names.push_back(c.name);
  std::vector<std::string> expect{
      "user_conservation", "queue_conservation", "flight_agreement",
      "g_of_f_identity",   "delay_fixed_point",  "ack_flow_identity",
      "ack_buffer_sign",   "retaining_silence",  "static_link"};
  EXPECT_EQ(names, expect);
}

TEST(Checks, StaticLinkApplicability) {
  TraceSet homogeneous = run("staticlink", 6.0);
  StaticLinkResult a = static_link_check(homogeneous);
  EXPECT_TRUE(a.applicable) << a.reason;
  EXPECT_LE(a.max_deviation, kStaticLinkTolerance);

  TraceSet mixed = run("scenario1", 1.0);
  StaticLinkResult b = static_link_check(mixed);
  EXPECT_FALSE(b.applicable);
  EXPECT_NE(b.reason.find("homogeneous"), std::string::npos);
  EXPECT_EQ(check_static_link(mixed).status, CheckStatus::kNotApplicable);
}

TEST(Checks, AckIdentityPointwise) {
  TraceSet tr = run("scenario1", 4.0);
  const double c = tr.network.capacity(0);
  for (double t : {0.5, 2.9, 3.5, 3.9}) {
    for (int i = 0; i < 2; ++i) {
      EXPECT_LT(ack_flow_identity_check(tr, i, t), 0.01 * c) << t;
    }
  }
}

TEST(Checks, PrunedHistorySkipsLookbackChecks) {
  Scenario s = preset("scenario1");
  s.run.horizon = 3.0;
  SimConfig cfg = SimConfig::from(s);
  cfg.prune_history = true;
  TraceSet tr = simulate(s, cfg);
  EXPECT_EQ(check_user_conservation(tr).status, CheckStatus::kNotApplicable);
  EXPECT_EQ(check_queue_conservation(tr).status, CheckStatus::kNotApplicable);
}

}  // namespace
}  // namespace fluidnet
