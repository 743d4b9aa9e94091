#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "fluidnet/scenario.h"
#include "fluidnet/topology.h"
#include "fluidnet/user.h"

namespace fluidnet {

struct PacketEvent {
  enum class Kind { kSend, kEnqueue, kDequeue, kAck };

  long packet = 0;
  int flow = 0;   // network flow index (users first, then cross sources)
  Kind kind = Kind::kSend;
  int queue = -1;  // for enqueue/dequeue
  double time = 0.0;
};

const char* to_string(PacketEvent::Kind k);

struct PacketSimConfig {
  double warmup = 10.0;           // seconds simulated before t = 0
  double sample_interval = 1e-3;  // seconds
  double horizon = 10.0;          // seconds
  bool log_events = false;

  static PacketSimConfig from(const Scenario& s);
};

// Sampled state of a packet-level run. Samples are taken at
// t = 0, interval, 2 interval, ... <= horizon, after every event at or
// before the sample time. Counters are cumulative from t = 0.
struct PacketTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> queue;   // [queue][sample] packets waiting
  std::vector<std::vector<double>> window;  // [user][sample]
  std::vector<std::vector<double>> flight;  // [user][sample]
  std::vector<std::vector<double>> sent;    // [user][sample]
  std::vector<std::vector<double>> acked;   // [user][sample]
  // [queue][slot][sample], slots ordered as in the fluid engine.
  std::vector<std::vector<std::vector<double>>> arrivals;
  std::vector<std::vector<std::vector<double>>> departures;
  std::vector<std::vector<Silence>> silences;  // [user]
  std::vector<PacketEvent> events;             // when logging is on
  // Departure times per queue and slot, from t = 0, for exact counting.
  std::vector<std::vector<std::vector<double>>> departure_times;

  // Departures of one slot in [t0, t1).
  long departures_between(int queue, int slot, double t0, double t1) const;
  // Time average of the sampled queue over [t0, t1].
  double mean_queue(int queue, double t0, double t1) const;
};

// Event-driven packet simulation: window-limited sources (send while
// flight < w), FIFO queues serving one packet per 1/c, constant-delay
// channels and deterministic periodic cross-traffic streams. A packet
// leaves a queue when its service starts, matching the fluid queue whose
// delay is q / c. Throws ConfigError for FAST users (no packet-level FAST).
PacketTrace packet_sim(const Scenario& s, const PacketSimConfig& cfg);

// CSV: time,event,packet,flow,queue
void write_event_log(const PacketTrace& tr, const Network& n, std::ostream& out);

}  // namespace fluidnet
