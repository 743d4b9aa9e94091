#pragma once

#include <vector>

namespace fluidnet {

struct FastParams {
  double gamma = 0.5;   // gain
  double alpha = 200.;  // packets the flow aims to keep queued

  bool operator==(const FastParams&) const = default;
};

// FAST window dynamics:
//   wdot = gamma * (alpha - tau_back / (T + tau_back) * w)
// Throws ConfigError if T <= 0 or the parameters are not positive.
double fast_wdot(double w, double tau_back, double T, const FastParams& p);

struct WindowStep {
  double time;    // seconds
  double window;  // packets from `time` on

  bool operator==(const WindowStep&) const = default;
};

// Piecewise-constant window: `initial` until the first step.
struct WindowSchedule {
  double initial = 0.0;
  std::vector<WindowStep> steps;

  // Throws ConfigError unless step times strictly increase and every window
  // is >= 0.
  void validate() const;

  // Right-continuous value.
  double window_at(double t) const;
  // Mean of the one-sided limits; differs from window_at only at a step.
  double sampled_at(double t) const;

  bool operator==(const WindowSchedule&) const = default;
};

// Scheduled window seen from a fixed grid. A step is reported on the grid
// tick nearest to its time, so it lands as one impulse.
struct ScheduledSample {
  double window;   // value after any impulse at this tick
  double impulse;  // window jump at this tick, 0 elsewhere
};
ScheduledSample scheduled_wdot(const WindowSchedule& s, double t, double dt);

// Per-user window controller.
struct Protocol {
  enum class Kind { kScheduled, kFast };

  Kind kind = Kind::kScheduled;
  WindowSchedule schedule;  // kScheduled
  FastParams fast;          // kFast
  double fast_initial_window = 0.0;

  double initial_window() const {
    return kind == Kind::kFast ? fast_initial_window : schedule.initial;
  }

  bool operator==(const Protocol&) const = default;
};

}  // namespace fluidnet
