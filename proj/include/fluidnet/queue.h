#pragma once

#include <span>
#include <string>
#include <vector>

#include "fluidnet/history.h"

namespace fluidnet {

// Queue lengths at or below this many packets count as empty when deciding
// the congestion mode, so rounding residue cannot flip the mode.
inline constexpr double kDefaultEmptyThreshold = 1e-9;

// Outcome of integrating the integrator queue over one step.
struct QueueStep {
  double length = 0.0;       // packets at the end of the step
  double served = 0.0;       // packets that left during the step
  double empty_time = -1.0;  // offset into the step where the queue emptied,
                             // -1 if it did not
  int mode_switches = 0;
};

// Integrates dq/ds = in(s) - r(s) over one step of length dt, where the total
// input varies linearly from `input_begin` to `input_end` and r is the
// capacity while congested, the input otherwise. Switch instants (emptying,
// congestion onset) are solved exactly for the linear input, so the length
// never crosses below zero.
QueueStep queue_step(double length, double input_begin, double input_end,
                     double dt, double capacity,
                     double empty_threshold = kDefaultEmptyThreshold);

// FIFO buffer edge <b-, b+> with per-flow input and output histories.
//
// Each engine tick calls step() with the input rates at the tick time, then
// record_outputs() once every dependency of the outputs is recorded. The
// forward map f(t) = t + tau(t) is stored as a trajectory and inverted for
// the backward map g.
class FifoQueue {
 public:
  struct Diagnostics {
    int invertibility_violations = 0;
    double first_violation_time = 0.0;
  };

  FifoQueue(std::string id, double capacity,
            std::vector<std::string> flow_names,
            double empty_threshold = kDefaultEmptyThreshold);

  // Seeds history before `t_start`: constant per-flow rates and length, one
  // grid step back, and a forward map reaching back `history_span` seconds.
  void initialize(double t_start, double dt, double length,
                  std::span<const double> flow_rates, double history_span);

  // Records the input rates at t and integrates the length from the previous
  // tick. Throws std::invalid_argument on a negative input.
  void step(double t, std::span<const double> input_rates);

  // Records per-flow output rates at t. A congested queue whose arrival-time
  // input was zero keeps the previous backward time and bumps the
  // invertibility diagnostic instead of failing the run.
  void record_outputs(double t);

  // g(t) = f^{-1}(t).
  double backward_time(double t) const;
  // Dini derivative of g: capacity / total input at g(t) while congested,
  // 1 otherwise. Throws InvertibilityError if that input is zero.
  double backward_rate(double t) const;
  // phi_l(b+, t) = g'(t) phi_l(b-, g(t)). Throws InvertibilityError as above.
  std::vector<double> output_flows(double t) const;
  bool congested_at(double t) const;
  double total_input(double t) const { return total_input_.eval(t); }

  const std::string& id() const { return id_; }
  double capacity() const { return capacity_; }
  double empty_threshold() const { return empty_threshold_; }
  double length() const { return length_.last_value(); }
  std::size_t flow_count() const { return flow_names_.size(); }
  const std::string& flow_name(std::size_t k) const { return flow_names_[k]; }
  const Diagnostics& diagnostics() const { return diagnostics_; }

  const Trajectory& input(std::size_t k) const { return inputs_[k]; }
  const Trajectory& output(std::size_t k) const { return outputs_[k]; }
  const Trajectory& total_input_history() const { return total_input_; }
  const Trajectory& length_history() const { return length_; }
  const Trajectory& delay_history() const { return delay_; }
  const Trajectory& forward_map() const { return forward_; }
  const Trajectory& congested_history() const { return congested_; }
  const Trajectory& output_rate_history() const { return output_rate_; }

  // True if t is within `width` of a step whose input changed fast
  // enough to need sub-samples (a burst passing through).
  bool near_steep_input(double t, double width) const;

  void prune_before(double t);

 private:
  std::string id_;
  double capacity_;
  double empty_threshold_;
  std::vector<std::string> flow_names_;
  std::vector<Trajectory> inputs_;
  std::vector<Trajectory> outputs_;
  Trajectory total_input_;
  Trajectory length_;
  Trajectory delay_;
  Trajectory forward_;
  std::vector<double> steep_times_;  // ends of sub-sampled steps
  Trajectory congested_;
  Trajectory output_rate_;
  double last_backward_time_ = 0.0;
  bool have_backward_time_ = false;
  Diagnostics diagnostics_;
};

}  // namespace fluidnet
