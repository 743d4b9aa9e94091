#pragma once

#include <string>
#include <vector>

#include "fluidnet/protocol.h"
#include "fluidnet/topology.h"
#include "fluidnet/traffic.h"

namespace fluidnet {

enum class InitMode { kCold, kEquilibrium };

struct RunSettings {
  double dt = 1e-4;        // seconds
  double horizon = 10.0;   // seconds
  InitMode init = InitMode::kEquilibrium;
  double packet_warmup = 10.0;     // seconds the packet oracle runs before 0
  double sample_interval = 1e-3;   // seconds between oracle samples
  // Per-period flow comparison window for open-loop scenarios, 0 = off.
  double count_period = 0.0;

  bool operator==(const RunSettings&) const = default;
};

// Everything needed to run one experiment, in packets and seconds.
struct Scenario {
  std::string name;
  std::string description;
  double packet_bytes = 0.0;  // 0 when capacities were given in pkt/s
  NetworkSpec network;
  std::vector<Protocol> protocols;        // one per network.users entry
  std::vector<TrafficProfile> cross;      // one per network.cross entry
  RunSettings run;

  // Throws ConfigError on inconsistent sizes or invalid protocol/profile
  // parameters. Topology errors are reported by Network::build.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

// Capacity conversion: bits per second over 8 * packet bytes.
double mbps_to_pps(double mbps, double packet_bytes);

// JSON scenario files. Every physical quantity carries its unit in the key
// (capacity_mbps | capacity_pps, delay_ms | delay_s, time_s, ...). Unknown
// keys, missing units and dangling references raise ParseError naming the
// field.
Scenario parse_scenario(const std::string& text);
// Canonical JSON in normalized units; parse_scenario(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

}  // namespace fluidnet
