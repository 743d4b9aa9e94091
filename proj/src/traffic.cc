#include "fluidnet/traffic.h"

#include <algorithm>
#include <cmath>

#include "fluidnet/errors.h"

namespace fluidnet {

TrafficProfile TrafficProfile::constant(double fraction) {
  TrafficProfile p;
  p.mean = fraction;
  return p;
}

TrafficProfile TrafficProfile::square(double mean, double amplitude,
                                      double period, double phase) {
  TrafficProfile p;
  p.kind = Kind::kSquare;
  p.mean = mean;
  p.amplitude = amplitude;
  p.period = period;
  p.phase = phase;
  return p;
}

void TrafficProfile::validate() const {
  if (!std::isfinite(mean) || !std::isfinite(amplitude) ||
      !std::isfinite(phase)) {
    throw ConfigError("traffic profile has a non-finite parameter");
  }
  if (kind == Kind::kConstant) {
    if (mean < 0.0) throw ConfigError("traffic fraction must be >= 0");
    return;
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("square traffic period must be > 0");
  }
  if (mean - std::abs(amplitude) < -1e-12) {
    throw ConfigError("square traffic goes negative (mean < |amplitude|)");
  }
}

double TrafficProfile::fraction(double t) const {
  if (kind == Kind::kConstant) return mean;
  double x = (t + phase) / period;
  double frac = x - std::floor(x);
  // Jumps at frac == 0 and frac == 0.5; relative tolerance for grid times.
  constexpr double kEdge = 1e-9;
  if (frac < kEdge || frac > 1.0 - kEdge || std::abs(frac - 0.5) < kEdge) {
    return mean;
  }
  return frac < 0.5 ? mean + amplitude : mean - amplitude;
}

double TrafficProfile::right_limit(double t) const {
  if (kind == Kind::kConstant) return mean;
  double x = (t + phase) / period;
  double frac = x - std::floor(x);
  if (frac > 1.0 - 1e-9) frac = 0.0;
  return frac < 0.5 - 1e-9 ? mean + amplitude : mean - amplitude;
}

double TrafficProfile::integral(double t) const {
  if (kind == Kind::kConstant) return mean * t;
  // Sq integrates to zero over a period; the partial period is a triangle
  // wave with peak period/2.
  auto sq_integral = [&](double s) {
    double x = s / period;
    double frac = x - std::floor(x);
    return period * (frac < 0.5 ? frac : 1.0 - frac);
  };
  return mean * t + amplitude * (sq_integral(t + phase) - sq_integral(phase));
}

double TrafficProfile::time_of_integral(double y, double from) const {
  if (!(mean > 0.0)) {
    throw ConfigError("inverse of a traffic profile with zero mean");
  }
  if (y <= 0.0) return from;
  if (kind == Kind::kConstant) return from + y / mean;
  // The integral is nondecreasing; bracket, then bisect to the left edge.
  const double base = integral(from);
  double lo = from;
  double hi = from + y / mean + period;
  while (integral(hi) - base < y) hi += period;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi));
       ++i) {
    double mid = 0.5 * (lo + hi);
    if (integral(mid) - base >= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace fluidnet
