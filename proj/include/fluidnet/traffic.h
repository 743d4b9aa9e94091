#pragma once

namespace fluidnet {

// Deterministic open-loop load on a queue, as a fraction of its capacity.
//
//   constant: fraction(t) = mean
//   square:   fraction(t) = mean + amplitude * Sq((t + phase) / period)
//
// Sq is +1 on the first half of each period and -1 on the second. At a jump
// the sampled value is the mean of the one-sided limits, which keeps
// trapezoidal sums on any grid through the jump exact.
struct TrafficProfile {
  enum class Kind { kConstant, kSquare };

  Kind kind = Kind::kConstant;
  double mean = 0.0;
  double amplitude = 0.0;
  double period = 1.0;  // seconds
  double phase = 0.0;   // seconds

  static TrafficProfile constant(double fraction);
  static TrafficProfile square(double mean, double amplitude, double period,
                               double phase = 0.0);

  // Throws ConfigError if the load can go negative or the period is not
  // positive.
  void validate() const;

  double fraction(double t) const;
  // Limit of fraction(s) as s decreases to t.
  double right_limit(double t) const;
  // Integral of fraction over [0, t], in seconds of full-capacity load.
  // Negative t integrates backwards, so the profile extends before zero.
  double integral(double t) const;
  // Smallest t >= from with integral(t) - integral(from) >= y. Requires a
  // positive mean.
  double time_of_integral(double y, double from = 0.0) const;

  bool operator==(const TrafficProfile&) const = default;
};

}  // namespace fluidnet
