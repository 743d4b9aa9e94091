#include "fluidnet/presets.h"

#include <algorithm>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

Protocol scheduled(double initial, std::vector<WindowStep> steps = {}) {
  Protocol p;
  p.schedule.initial = initial;
  p.schedule.steps = std::move(steps);
  return p;
}

// One bottleneck "b1"; user k gets forward delay tf[k] and backward tb[k].
Scenario single_bottleneck(const std::string& name, double packet_bytes,
                           double capacity_mbps, std::vector<double> tf,
                           std::vector<double> tb,
                           std::vector<Protocol> protocols) {
  Scenario s;
  s.name = name;
  s.packet_bytes = packet_bytes;
  s.network.queues.push_back({"b1", mbps_to_pps(capacity_mbps, packet_bytes)});
  for (std::size_t k = 0; k < protocols.size(); ++k) {
    std::string u = "u" + std::to_string(k + 1);
    s.network.users.push_back({u, {"b1"}});
    s.network.channels.push_back({u + "+", "b1-", tf[k]});
    s.network.channels.push_back({"b1+", u + "-", tb[k]});
  }
  s.protocols = std::move(protocols);
  return s;
}

// Two buffers in series. User 1 crosses both, user 2 only b2, user 3 only
// b1; link 1 is 20 ms and link 2 is 40 ms each way.
Scenario series(const std::string& name, std::vector<double> windows,
                int stepped_user, double cross_fraction) {
  Scenario s;
  s.name = name;
  s.packet_bytes = 1448;
  s.network.queues = {{"b1", mbps_to_pps(72, 1448)},
                      {"b2", mbps_to_pps(180, 1448)}};
  s.network.users = {{"u1", {"b1", "b2"}}, {"u2", {"b2"}}, {"u3", {"b1"}}};
  s.network.channels = {
      {"u1+", "b1-", 0.0},   {"b1+", "b2-", 0.020}, {"b2+", "u1-", 0.100},
      {"u2+", "b2-", 0.0},   {"b2+", "u2-", 0.080}, {"u3+", "b1-", 0.0},
      {"b1+", "u3-", 0.040},
  };
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (static_cast<int>(k) == stepped_user) {
      s.protocols.push_back(scheduled(windows[k], {{10.0, windows[k] + 200}}));
    } else {
      s.protocols.push_back(scheduled(windows[k]));
    }
  }
  if (cross_fraction > 0.0) {
    s.network.cross.push_back({"x1", "b1"});
    s.cross.push_back(TrafficProfile::constant(cross_fraction));
  }
  s.run.horizon = 20.0;
  return s;
}

Scenario window_halving(const std::string& name, double capacity_mbps,
                        double cross_fraction) {
  Scenario s = single_bottleneck(name, 1040, capacity_mbps, {0.075}, {0.075},
                                 {scheduled(500, {{5.0, 250}})});
  if (cross_fraction > 0.0) {
    s.network.cross.push_back({"x1", "b1"});
    s.cross.push_back(TrafficProfile::constant(cross_fraction));
  }
  s.run.horizon = 10.0;
  return s;
}

Scenario build(const std::string& name) {
  if (name == "scenario1") {
    Scenario s = single_bottleneck(name, 1590, 100, {0.0016, 0.0585},
                                   {0.0016, 0.0585},
                                   {scheduled(50, {{3.0, 150}}), scheduled(550)});
    s.description = "two users, one bottleneck, w1 50 -> 150 at 3 s";
    s.run.horizon = 8.0;
    return s;
  }
  if (name == "scenario2") {
    Scenario s = single_bottleneck(name, 1590, 100, {0.005, 0.045},
                                   {0.005, 0.045},
                                   {scheduled(210, {{5.0, 300}}), scheduled(750)});
    s.description = "two users, one bottleneck, w1 210 -> 300 at 5 s";
    s.run.horizon = 10.0;
    return s;
  }
  if (name == "scenario3") {
    Scenario s = series(name, {1600, 1200, 5}, 0, 0.0);
    s.description = "two buffers in series, w1 +200 at 10 s";
    return s;
  }
  if (name == "scenario4") {
    Scenario s = series(name, {1600, 1200, 5}, 1, 0.0);
    s.description = "two buffers in series, w2 +200 at 10 s";
    return s;
  }
  if (name == "scenario5") {
    Scenario s = series(name, {1200, 1600, 5}, 0, 0.5);
    s.description = "series buffers, half of link 1 used by cross traffic, "
                    "w1 +200 at 10 s";
    return s;
  }
  if (name == "scenario6") {
    Scenario s = series(name, {1200, 1600, 5}, 1, 0.5);
    s.description = "series buffers, half of link 1 used by cross traffic, "
                    "w2 +200 at 10 s";
    return s;
  }
  if (name == "scenario7") {
    Scenario s = window_halving(name, 12.5, 0.0);
    s.description = "single user, window halved at 5 s";
    return s;
  }
  if (name == "scenario8") {
    Scenario s = window_halving(name, 25, 0.5);
    s.description = "single user, half the link used by cross traffic, "
                    "window halved at 5 s";
    return s;
  }
  if (name == "squarewave") {
    Scenario s;
    s.name = name;
    s.description = "two open-loop square-wave flows in phase opposition";
    s.packet_bytes = 1500;
    s.network.queues.push_back({"b1", mbps_to_pps(100, 1500)});
    s.network.cross = {{"x1", "b1"}, {"x2", "b1"}};
    s.cross = {TrafficProfile::square(0.55, 0.55, 1.0),
               TrafficProfile::square(0.55, -0.55, 1.0)};
    s.run.init = InitMode::kCold;
    s.run.packet_warmup = 0.0;
    s.run.horizon = 10.0;
    s.run.count_period = 1.0;
    return s;
  }
  if (name == "fast") {
    Protocol p;
    p.kind = Protocol::Kind::kFast;
    p.fast = {0.5, 200};
    p.fast_initial_window = 10;
    Scenario s = single_bottleneck(name, 1500, 100, {0.05, 0.05}, {0.05, 0.05},
                                   {p, p});
    s.description = "two homogeneous FAST users on one bottleneck";
    s.run.init = InitMode::kCold;
    s.run.horizon = 40.0;
    return s;
  }
  if (name == "staticlink") {
    Scenario s = single_bottleneck(
        name, 1500, 100, {0.020, 0.020}, {0.030, 0.030},
        {scheduled(400, {{2.0, 500}}), scheduled(600, {{4.0, 800}})});
    s.description = "homogeneous delays, permanently congested bottleneck";
    s.run.horizon = 6.0;
    return s;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"scenario1", "scenario2", "scenario3", "scenario4",
          "scenario5", "scenario6", "scenario7", "scenario8",
          "squarewave", "fast",     "staticlink"};
}

bool is_preset(const std::string& name) {
  auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario preset(const std::string& name) {
  Scenario s = build(name);
  s.validate();
  return s;
}

}  // namespace fluidnet
