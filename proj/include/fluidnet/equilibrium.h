#pragma once

#include <vector>

#include "fluidnet/topology.h"

namespace fluidnet {

// Steady state of fixed windows: per-user rate x_i = w_i / (T_i + sum of
// tau_j over the circuit), and every queue either congested with
// sum x_i = c_j (1 - delta_j), or empty with sum x_i <= c_j (1 - delta_j).
struct EquilibriumProblem {
  const Network* network = nullptr;
  std::vector<double> windows;         // per user, packets
  std::vector<double> cross_fraction;  // per queue, summed over sources
};

struct EquilibriumResult {
  std::vector<double> tau;        // per queue, seconds
  std::vector<double> rates;      // per user, packets per second
  std::vector<bool> congested;    // per queue
  double residual = 0.0;          // worst |load - capacity| / capacity
  int iterations = 0;
  bool used_bisection = false;

  double queue_length(const Network& n, int j) const {
    return tau[j] * n.capacity(j);
  }
};

inline constexpr int kEquilibriumMaxIterations = 100000;
inline constexpr double kEquilibriumTolerance = 1e-9;  // relative to c

// Damped per-queue Newton iteration, then per-coordinate bisection sweeps if
// that stalls. Throws SimulationError after kEquilibriumMaxIterations
// iterations without reaching the tolerance, ConfigError if the cross load
// alone saturates a queue.
EquilibriumResult equilibrium_queue(const EquilibriumProblem& p);

}  // namespace fluidnet
