#include "fluidnet/history.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

// Delayed reads such as k*dt - m*dt can land a few ulps past the newest sample.
constexpr double kReadSlack = 1e-10;

std::string fmt_time(double t) { return std::to_string(t); }

}  // namespace

Trajectory::Trajectory(double initial_value) : initial_value_(initial_value) {}

void Trajectory::record(double t, double v) {
  if (!std::isfinite(v)) {
    throw SimulationError("non-finite sample " + std::to_string(v) +
                          " at t=" + fmt_time(t));
  }
  if (!times_.empty() && !(t > times_.back())) {
    throw CausalityError("record at t=" + fmt_time(t) +
                         " does not follow last sample t=" +
                         fmt_time(times_.back()));
  }
  if (times_.empty()) {
    cumulative_.push_back(0.0);
  } else {
    double area = 0.5 * (t - times_.back()) * (v + values_.back());
    cumulative_.push_back(cumulative_.back() + area);
  }
  times_.push_back(t);
  values_.push_back(v);
}

double Trajectory::first_time() const {
  if (times_.empty()) throw CausalityError("empty trajectory has no samples");
  return times_.front();
}

double Trajectory::last_time() const {
  if (times_.empty()) throw CausalityError("empty trajectory has no samples");
  return times_.back();
}

double Trajectory::last_value() const {
  return times_.empty() ? initial_value_ : values_.back();
}

double Trajectory::clamp_to_recorded(double t) const {
  if (times_.empty()) {
    throw CausalityError("read at t=" + fmt_time(t) + " of empty trajectory");
  }
  if (t > times_.back()) {
    if (t - times_.back() > kReadSlack) {
      throw CausalityError("read at t=" + fmt_time(t) +
                           " is after last sample t=" +
                           fmt_time(times_.back()));
    }
    return times_.back();
  }
  if (pruned_ && t < times_.front()) {
    throw CausalityError("read at t=" + fmt_time(t) +
                         " precedes retained history");
  }
  return t;
}

std::size_t Trajectory::locate(double t) const {
  const std::size_t n = times_.size();
  // Most reads hit the newest cell.
  if (n >= 2 && t >= times_[n - 2]) return n - 2;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double Trajectory::eval(double t) const {
  t = clamp_to_recorded(t);
  if (t < times_.front()) return initial_value_;
  if (times_.size() == 1 || t == times_.back()) return values_.back();
  std::size_t i = locate(t);
  double t0 = times_[i], t1 = times_[i + 1];
  if (t == t0) return values_[i];
  double a = (t - t0) / (t1 - t0);
  return values_[i] + a * (values_[i + 1] - values_[i]);
}

double Trajectory::cumulative(double t) const {
  if (t <= times_.front()) return -initial_value_ * (times_.front() - t);
  if (t >= times_.back()) return cumulative_.back();
  std::size_t i = locate(t);
  double v = eval(t);
  return cumulative_[i] + 0.5 * (t - times_[i]) * (values_[i] + v);
}

double Trajectory::integrate(double t0, double t1) const {
  if (t1 < t0) {
    throw std::invalid_argument("integrate: reversed bounds [" +
                                fmt_time(t0) + ", " + fmt_time(t1) + "]");
  }
  if (t0 == t1) return 0.0;
  t1 = clamp_to_recorded(t1);
  t0 = clamp_to_recorded(std::min(t0, t1));
  return cumulative(t1) - cumulative(t0);
}

double Trajectory::invert_monotone(double y) const {
  if (times_.empty()) {
    throw CausalityError("inversion of empty trajectory");
  }
  if (y < values_.front() || y > values_.back()) {
    throw CausalityError("inversion target " + std::to_string(y) +
                         " outside recorded range [" +
                         std::to_string(values_.front()) + ", " +
                         std::to_string(values_.back()) + "]");
  }
  auto it = std::lower_bound(values_.begin(), values_.end(), y);
  std::size_t i = static_cast<std::size_t>(it - values_.begin());
  if (i == 0 || values_[i] == y) return times_[i];
  double v0 = values_[i - 1], v1 = values_[i];
  double a = (y - v0) / (v1 - v0);
  return times_[i - 1] + a * (times_[i] - times_[i - 1]);
}

void Trajectory::prune_before(double t) {
  if (times_.size() < 2 || t <= times_.front()) return;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t keep_from = static_cast<std::size_t>(it - times_.begin());
  if (keep_from == 0) return;
  keep_from -= 1;  // last sample at or before t
  if (keep_from == 0) return;
  // cumulative() is measured from the first retained sample.
  double base = cumulative_[keep_from];
  times_.erase(times_.begin(), times_.begin() + keep_from);
  values_.erase(values_.begin(), values_.begin() + keep_from);
  cumulative_.erase(cumulative_.begin(), cumulative_.begin() + keep_from);
  for (double& c : cumulative_) c -= base;
  pruned_ = true;
}

double PacketCounter::operator()(double t, double t0) const {
  return flow_->integrate(t0, t);
}

}  // namespace fluidnet
