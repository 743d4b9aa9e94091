#pragma once

#include <string>
#include <vector>

#include "fluidnet/engine.h"

namespace fluidnet {

enum class CheckStatus { kPass, kFail, kNotApplicable };

const char* to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kNotApplicable;
  double value = 0.0;  // worst observed deviation
  double limit = 0.0;
  std::string detail;

  bool ok() const { return status != CheckStatus::kFail; }
};

// Tolerances of the standard checks.
inline constexpr double kConservationTolerance = 2.0;  // packets
inline constexpr double kIdentityTolerance = 1e-6;     // seconds
inline constexpr double kAckResidualFraction = 0.01;   // of capacity
inline constexpr double kStaticLinkTolerance = 2.0;    // packets

// sent(0, t) - acked(0, t) == flight(t) - flight(0) for every user and tick.
CheckResult check_user_conservation(const TraceSet& tr,
                                    double tol = kConservationTolerance);
// Per queue and flow: input - output + initial content == content(t) >= 0,
// and the contents add up to q(t).
CheckResult check_queue_conservation(const TraceSet& tr,
                                     double tol = kConservationTolerance);
// Circuit-integral flight size against the flight-control ODE.
CheckResult check_flight_agreement(const TraceSet& tr,
                                   double tol = kConservationTolerance);
// g(f(t)) == t wherever f strictly increases into t.
CheckResult check_backward_of_forward(const TraceSet& tr,
                                      double tol = kIdentityTolerance);
// g(t) + tau(g(t)) == t at congested ticks.
CheckResult check_delay_fixed_point(const TraceSet& tr,
                                    double tol = kIdentityTolerance);
// |phi(u-, t) - B_C'(t) phi(u+, B_C(t))| below a fraction of the smallest
// capacity on the circuit.
CheckResult check_ack_identity(const TraceSet& tr,
                               double fraction = kAckResidualFraction);
// pi <= 0 always and sending >= 0 always.
CheckResult check_ack_buffer_sign(const TraceSet& tr);

// Sending is exactly 0 at every tick where pi < 0.
CheckResult check_retaining_silence(const TraceSet& tr);

// ACK identity residual for one user at t, recomputed from the traces.
double ack_flow_identity_check(const TraceSet& tr, int user, double t);

struct StaticLinkResult {
  bool applicable = false;
  std::string reason;          // why not, when not applicable
  double max_deviation = 0.0;  // packets
};
// Compares c tau(t) with sum_i w_i(t - T^f) - c (T^f + T^b) on a single
// queue with homogeneous delays, no cross traffic, congestion at every tick
// and every user active at every tick.
StaticLinkResult static_link_check(const TraceSet& tr);
CheckResult check_static_link(const TraceSet& tr,
                              double tol = kStaticLinkTolerance);

// All of the above, in a fixed order.
std::vector<CheckResult> run_checks(const TraceSet& tr);

}  // namespace fluidnet
