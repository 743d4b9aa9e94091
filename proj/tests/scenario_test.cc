#include "fluidnet/scenario.h"

#include <cstdint>
#include <map>

#include <gtest/gtest.h>

#include "fluidnet/errors.h"
#include "fluidnet/presets.h"

namespace fluidnet {
namespace {

const char* kMinimal = R"({
  "name": "mini",
  "packet_bytes": 1500,
  "queues": [{"id": "b", "capacity_mbps": 12}],
  "users": [{"id": "u", "route": ["b"],
             "protocol": {"type": "scheduled", "initial_window": 40,
                          "steps": [{"time_ms": 500, "window": 80}]}}],
  "channels": [{"from": "u+", "to": "b-", "delay_ms": 10},
               {"from": "b+", "to": "u-", "delay_s": 0.03}],
  "cross": [{"id": "x", "queue": "b",
             "profile": {"type": "square", "mean": 0.2, "amplitude": 0.1,
                         "period_ms": 250}}],
  "run": {"dt_s": 0.0005, "horizon_s": 2, "init": "cold"}
})";

TEST(ParseScenario, NormalizesUnits) {
  Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "mini");
  EXPECT_DOUBLE_EQ(s.network.queues[0].capacity, 12e6 / (8 * 1500));
  EXPECT_DOUBLE_EQ(s.network.channels[0].delay, 0.010);
  EXPECT_DOUBLE_EQ(s.network.channels[1].delay, 0.030);
  EXPECT_DOUBLE_EQ(s.protocols[0].schedule.steps[0].time, 0.5);
  EXPECT_DOUBLE_EQ(s.cross[0].period, 0.25);
  EXPECT_EQ(s.run.init, InitMode::kCold);
  EXPECT_DOUBLE_EQ(s.run.dt, 5e-4);
}

TEST(ParseScenario, RoundTrip) {
  Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
  for (const std::string& name : preset_names()) {
    Scenario p = preset(name);
    EXPECT_EQ(parse_scenario(serialize_scenario(p)), p) << name;
  }
}

std::string field_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<no error>";
}

std::string replace(std::string s, const std::string& from,
                    const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

TEST(ParseScenario, UnknownKey) {
  std::string text = replace(kMinimal, "\"delay_ms\": 10", "\"delay_ms\": 10, \"colour\": 1");
  EXPECT_EQ(field_of(text), "/channels/0/colour");
}

TEST(ParseScenario, MissingUnit) {
  std::string text = replace(kMinimal, "\"delay_ms\": 10", "\"delay\": 10");
  EXPECT_NE(field_of(text).find("/channels/0"), std::string::npos);
}

TEST(ParseScenario, DanglingQueueReference) {
  std::string text = replace(kMinimal, "\"route\": [\"b\"]", "\"route\": [\"q\"]");
  EXPECT_EQ(field_of(text), "/users/0/route/0");
}

TEST(ParseScenario, EmptyAndMalformed) {
  EXPECT_THROW(parse_scenario(""), ParseError);
  EXPECT_THROW(parse_scenario("   \n"), ParseError);
  EXPECT_EQ(field_of("{\n  \"name\": \"x\",\n  oops\n}"), "line 3");
}

TEST(ParseScenario, MbpsNeedsPacketSize) {
  std::string text = replace(kMinimal, "\"packet_bytes\": 1500,", "");
  EXPECT_EQ(field_of(text), "/queues/0/capacity_mbps");
}

TEST(Presets, Scenario1Parameters) {
  Scenario s = preset("scenario1");
  EXPECT_NEAR(s.network.queues[0].capacity, 7861.635, 1e-3);
  Network n = Network::build(s.network);
  EXPECT_NEAR(n.circuit_of("u1").total_delay, 0.0032, 1e-12);
  EXPECT_NEAR(n.circuit_of("u2").total_delay, 0.117, 1e-12);
}

TEST(Presets, Scenario5Parameters) {
  Scenario s = preset("scenario5");
  ASSERT_EQ(s.cross.size(), 1u);
  EXPECT_EQ(s.network.cross[0].queue, "b1");
  EXPECT_DOUBLE_EQ(s.cross[0].fraction(1.0), 0.5);
  EXPECT_DOUBLE_EQ(s.protocols[0].schedule.initial, 1200);
  EXPECT_DOUBLE_EQ(s.protocols[1].schedule.initial, 1600);
  EXPECT_DOUBLE_EQ(s.protocols[2].schedule.initial, 5);
}

TEST(Presets, Scenario7Halving) {
  Scenario s = preset("scenario7");
  EXPECT_DOUBLE_EQ(s.protocols[0].schedule.initial, 500);
  EXPECT_DOUBLE_EQ(s.protocols[0].schedule.window_at(5.0), 250);
  EXPECT_NEAR(s.network.queues[0].capacity, 12.5e6 / (8 * 1040), 1e-9);
}

TEST(Presets, UnknownName) {
  EXPECT_FALSE(is_preset("scenario9"));
  EXPECT_THROW(preset("scenario9"), ConfigError);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Presets are frozen: any edit to a preset must update this table on purpose.
TEST(Presets, Checksums) {
  const std::map<std::string, std::uint64_t> frozen = {
      {"scenario1", 5695924578948914114ull},
      {"scenario2", 17683031607728324042ull},
      {"scenario3", 15940378350805818259ull},
      {"scenario4", 13070646573336609285ull},
      {"scenario5", 2753205389003046034ull},
      {"scenario6", 13292502180630187892ull},
      {"scenario7", 701258355498456690ull},
      {"scenario8", 10583379292824128240ull},
      {"squarewave", 18142228428395775085ull},
      {"fast", 8548291112501131331ull},
      {"staticlink", 8271922055439657872ull},
  };
  for (const std::string& name : preset_names()) {
    std::uint64_t h = fnv1a(serialize_scenario(preset(name)));
    auto it = frozen.find(name);
    ASSERT_NE(it, frozen.end()) << name;
    EXPECT_EQ(h, it->second) << name;
  }
}

}  // namespace
}  // namespace fluidnet
