#pragma once

#include <string>
#include <vector>

#include "fluidnet/history.h"

namespace fluidnet {

// T_i(t) = [pi == 0] and [wdot + ack >= 0]
bool is_active(double pi, double wdot, double ack_rate);

// Sending flow: wdot + ack while active, 0 while ACKs are retained.
double sending_flow(bool active, double wdot, double ack_rate);

struct AckBufferStep {
  double pi = 0.0;
  // Packets released after pi reached 0 inside the step (sent as a burst).
  double resumed = 0.0;
  // Offset into the step where pi reached 0, -1 if it did not.
  double fill_time = -1.0;
};

// Integrates pidot = wdot + ack over one step while retaining, with
// wdot + ack varying linearly from `rho_begin` to `rho_end`. pi is clamped at
// 0; whatever would have pushed it above 0 becomes `resumed`.
AckBufferStep ack_buffer_step(double pi, double rho_begin, double rho_end,
                              double dt);

struct WindowImpulse {
  double pi = 0.0;
  double burst = 0.0;  // packets to send at once
};

// Instantaneous window change `delta`. A decrease moves the deficit into pi;
// an increase first pays back any deficit, the rest is sent immediately.
WindowImpulse apply_window_impulse(double pi, double delta);

// A silent stretch after a window decrease: pi < 0 from `start` to `resume`.
struct Silence {
  double start;
  double resume;  // -1 if still silent at the end of the run
};

// One window-based user driven on the engine grid. Records window, wdot,
// pi, T_i, sending and ACK flows, and both flight-size computations.
class UserModel {
 public:
  UserModel(std::string id, double total_delay);

  // Seeds pre-history at t_start - dt: constant sending and ACK flow `rate`,
  // window `window`, pi = 0, active.
  void initialize(double t_start, double dt, double window, double rate);

  // Advances to tick t. `ack` is phi(u-, t), `wdot` the continuous window
  // derivative, `impulse` a window jump at this tick and `window` the
  // window to record. Returns phi(u+, t).
  double step(double t, double ack, double wdot, double impulse,
              double window);

  // Records the two flight-size values for the tick just stepped: the
  // circuit integral and the flight-control ODE. The first call sets the
  // ODE's origin to `flight_integral`.
  void record_flight(double t, double flight_integral, double tau_back,
                     double ack_residual);

  const std::string& id() const { return id_; }
  double total_delay() const { return total_delay_; }
  double pi() const { return pi_; }
  bool active() const { return active_; }
  const std::vector<Silence>& silences() const { return silences_; }
  // Ticks at which a window increase was sent as a burst.
  const std::vector<double>& burst_times() const { return burst_times_; }
  // True if t is within `width` of a burst tick.
  bool near_burst(double t, double width) const;

  const Trajectory& window() const { return window_; }
  const Trajectory& wdot() const { return wdot_; }
  const Trajectory& ack_buffer() const { return pi_history_; }
  const Trajectory& active_history() const { return active_history_; }
  const Trajectory& sending() const { return sending_; }
  const Trajectory& ack() const { return ack_; }
  const Trajectory& flight() const { return flight_; }
  const Trajectory& flight_ode() const { return flight_ode_; }
  const Trajectory& tau_back() const { return tau_back_; }
  const Trajectory& ack_residual() const { return ack_residual_; }

  void prune_before(double t);

 private:
  std::string id_;
  double total_delay_;
  double dt_ = 0.0;
  double pi_ = 0.0;
  bool active_ = true;
  double prev_rho_ = 0.0;
  double fprime_ = 0.0;       // flight derivative at the last step
  double prev_fprime_ = 0.0;  // and at the step before
  bool flight_started_ = false;
  double flight_ode_value_ = 0.0;
  std::vector<Silence> silences_;
  std::vector<double> burst_times_;

  Trajectory window_;
  Trajectory wdot_;
  Trajectory pi_history_;
  Trajectory active_history_;
  Trajectory sending_;
  Trajectory ack_;
  Trajectory flight_;
  Trajectory flight_ode_;
  Trajectory tau_back_;
  Trajectory ack_residual_;
};

}  // namespace fluidnet
