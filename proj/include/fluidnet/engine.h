#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluidnet/equilibrium.h"
#include "fluidnet/history.h"
#include "fluidnet/queue.h"
#include "fluidnet/scenario.h"
#include "fluidnet/topology.h"
#include "fluidnet/user.h"

namespace fluidnet {

struct SimConfig {
  double dt = 1e-4;
  double horizon = 10.0;
  InitMode init = InitMode::kEquilibrium;
  double empty_threshold = kDefaultEmptyThreshold;
  // Drop history older than the largest observed round trip plus
  // `prune_margin` seconds. Post-run checks that look back to t = 0 are
  // skipped on pruned traces.
  bool prune_history = false;
  double prune_margin = 1.0;

  static SimConfig from(const Scenario& s);
};

struct CrossTrace {
  std::string id;
  int queue = -1;
  Trajectory rate;  // packets per second injected into the queue
};

// Recorded run. Every trajectory holds one seed sample at -dt followed by
// the grid t_k = k * dt, k = 0 .. ticks - 1.
struct TraceSet {
  Scenario scenario;
  Network network;
  SimConfig config;
  std::size_t ticks = 0;
  std::vector<UserModel> users;
  std::vector<FifoQueue> queues;
  std::vector<CrossTrace> cross;
  // Per queue: aggregate user arrivals, sum_i phi(u_i+, t - T_i^f).
  std::vector<Trajectory> eta;
  // slot[flow][hop]: position of network flow `flow` in the flow list of
  // the hop-th queue on its path.
  std::vector<std::vector<int>> slot;
  std::optional<EquilibriumResult> initial_equilibrium;
  double runtime_seconds = 0.0;

  double time(std::size_t k) const {
    return static_cast<double>(k) * config.dt;
  }
  int invertibility_violations() const;
};

// B_C(t) for a user's circuit and its derivative: the send time of the
// packet whose ACK arrives at t, and d B_C / dt.
// rate_defined is false when some queue on the way was congested with zero
// arrival flow at the looked-up time (g' unbounded there).
struct CircuitBackward {
  double time = 0.0;
  double rate = 1.0;
  bool rate_defined = true;
  // False if some hop's backward time falls next to a burst in that
  // queue's input, where pointwise rates are discretization artifacts.
  bool regular = true;
};
CircuitBackward backward_circuit(const Network& n,
                                 const std::vector<FifoQueue>& queues,
                                 int user, double t, double width = 0.0);

// Integrates the network on the fixed grid. Throws ConfigError for invalid
// input (including dt above a tenth of the smallest positive channel delay)
// and SimulationError naming the block and time on NaN or divergence.
TraceSet simulate(const Scenario& s, const SimConfig& cfg);

// Windows each user holds just before t (equilibrium problem input).
std::vector<double> windows_before(const Scenario& s, double t);
// Cross-traffic fraction per queue at t.
std::vector<double> cross_fractions(const Scenario& s, const Network& n,
                                    double t);

}  // namespace fluidnet
