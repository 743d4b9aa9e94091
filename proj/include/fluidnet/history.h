#pragma once

#include <cstddef>
#include <vector>

namespace fluidnet {

// Time-indexed scalar signal. Samples are appended in strictly increasing
// time order; reads between samples interpolate linearly and reads before the
// first sample return `initial_value`.
//
// A running trapezoid sum is kept alongside the samples so integrate() is
// O(log n) regardless of the interval length.
class Trajectory {
 public:
  explicit Trajectory(double initial_value = 0.0);

  // Appends (t, v). Throws CausalityError if t is not after the last sample
  // and SimulationError if v is not finite.
  void record(double t, double v);

  // Linear interpolation. Throws CausalityError for t after the last sample
  // (beyond a 1e-10 s rounding allowance) or before pruned history.
  double eval(double t) const;

  // Trapezoidal integral over [t0, t1], partial end cells interpolated.
  double integrate(double t0, double t1) const;

  // Inverse of a nondecreasing trajectory: the smallest x with eval(x) == y.
  // Flat stretches therefore resolve to their left edge. Throws CausalityError
  // when y lies outside the recorded value range.
  double invert_monotone(double y) const;

  // Drops samples strictly older than t, keeping one sample at or before t so
  // reads at t stay exact. Reads before the retained range then throw.
  void prune_before(double t);

  bool empty() const { return times_.empty(); }
  std::size_t size() const { return times_.size(); }
  double initial_value() const { return initial_value_; }
  double first_time() const;
  double last_time() const;
  double last_value() const;
  double time_at(std::size_t i) const { return times_[i]; }
  double value_at(std::size_t i) const { return values_[i]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  // Integral from the first retained sample to t (negative before it).
  double cumulative(double t) const;
  // Index i with times_[i] <= t < times_[i + 1]; t must be inside the range.
  std::size_t locate(double t) const;
  double clamp_to_recorded(double t) const;

  double initial_value_;
  bool pruned_ = false;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

// N_x(t, t0): packets that crossed a point between t0 and t.
class PacketCounter {
 public:
  explicit PacketCounter(const Trajectory& flow) : flow_(&flow) {}

  double operator()(double t, double t0) const;

 private:
  const Trajectory* flow_;
};

}  // namespace fluidnet
