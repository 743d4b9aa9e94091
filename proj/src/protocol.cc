#include "fluidnet/protocol.h"

#include <cmath>
#include <string>

#include "fluidnet/errors.h"

namespace fluidnet {

double fast_wdot(double w, double tau_back, double T, const FastParams& p) {
  if (!(T > 0.0)) {
    throw ConfigError("FAST needs a positive propagation delay, got " +
                      std::to_string(T));
  }
  if (!(p.gamma > 0.0) || !(p.alpha > 0.0)) {
    throw ConfigError("FAST gamma and alpha must be > 0");
  }
  return p.gamma * (p.alpha - tau_back / (T + tau_back) * w);
}

void WindowSchedule::validate() const {
  if (!(initial >= 0.0) || !std::isfinite(initial)) {
    throw ConfigError("initial window must be finite and >= 0");
  }
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!std::isfinite(steps[k].time)) {
      throw ConfigError("window step time must be finite");
    }
    if (!(steps[k].window >= 0.0) || !std::isfinite(steps[k].window)) {
      throw ConfigError("window step value must be finite and >= 0");
    }
    if (k > 0 && !(steps[k].time > steps[k - 1].time)) {
      throw ConfigError("window step times must strictly increase");
    }
  }
}

double WindowSchedule::window_at(double t) const {
  double w = initial;
  for (const WindowStep& s : steps) {
    if (s.time > t) break;
    w = s.window;
  }
  return w;
}

double WindowSchedule::sampled_at(double t) const {
  double before = initial;
  for (const WindowStep& s : steps) {
    if (s.time > t) break;
    if (s.time == t) return 0.5 * (before + s.window);
    before = s.window;
  }
  return before;
}

ScheduledSample scheduled_wdot(const WindowSchedule& s, double t, double dt) {
  // Ticks are k*dt; a step belongs to the tick nearest its time.
  const long k = std::lround(t / dt);
  double w = s.initial;
  double impulse = 0.0;
  for (const WindowStep& st : s.steps) {
    long ks = std::lround(st.time / dt);
    if (ks > k) break;
    if (ks == k) impulse += st.window - w;
    w = st.window;
  }
  return {w, impulse};
}

}  // namespace fluidnet
