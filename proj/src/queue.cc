#include "fluidnet/queue.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

// Smallest x in (0, limit] where c0 + c1 x + c2 x^2 reaches zero from above,
// or -1. `from_empty` means c0 is the empty-queue value and the trivial root
// at x = 0 is skipped.
double first_zero(double c0, double c1, double c2, double limit,
                  bool from_empty) {
  if (from_empty) {
    if (c2 < 0.0) {
      double x = -c1 / c2;
      if (x > 0.0 && x <= limit) return x;
    }
    return -1.0;
  }
  // Effectively linear over the step.
  if (std::abs(c2) * limit * limit <= 1e-14 * (c0 + std::abs(c1) * limit)) {
    if (c1 < 0.0) {
      double x = -c0 / c1;
      if (x <= limit) return x;
    }
    return -1.0;
  }
  double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return -1.0;
  double s = std::sqrt(disc);
  double qq = -0.5 * (c1 + (c1 >= 0.0 ? s : -s));
  double best = -1.0;
  for (double r : {qq / c2, qq != 0.0 ? c0 / qq : -1.0}) {
    if (r > 0.0 && r <= limit && (best < 0.0 || r < best)) best = r;
  }
  return best;
}

}  // namespace

QueueStep queue_step(double length, double input_begin, double input_end,
                     double dt, double capacity, double empty_threshold) {
  if (!(dt > 0.0)) throw std::invalid_argument("queue_step: dt must be > 0");
  if (input_begin < 0.0 || input_end < 0.0) {
    throw std::invalid_argument("queue_step: negative input flow");
  }
  QueueStep out;
  const double slope = (input_end - input_begin) / dt;
  double q = std::max(length, 0.0);
  double s = 0.0;
  // At most: drain, idle, onset, drain again.
  for (int guard = 0; s < dt && guard < 8; ++guard) {
    const double rest = dt - s;
    const double net = input_begin + slope * s - capacity;
    const bool empty = q <= empty_threshold;
    if (!empty || net > 0.0 || (net == 0.0 && slope > 0.0)) {
      double x = first_zero(empty ? 0.0 : q, net, 0.5 * slope, rest, empty);
      if (x < 0.0) {
        q = (empty ? 0.0 : q) + net * rest + 0.5 * slope * rest * rest;
        s = dt;
      } else {
        s += x;
        q = 0.0;
        out.empty_time = s;
        ++out.mode_switches;
      }
    } else {
      q = 0.0;
      if (slope > 0.0) {
        double x = -net / slope;
        if (x < rest) {
          s += x;
          ++out.mode_switches;
          continue;
        }
      }
      s = dt;
    }
  }
  out.length = std::max(q, 0.0);
  out.served = 0.5 * (input_begin + input_end) * dt - (out.length - length);
  return out;
}

FifoQueue::FifoQueue(std::string id, double capacity,
                     std::vector<std::string> flow_names,
                     double empty_threshold)
    : id_(std::move(id)),
      capacity_(capacity),
      empty_threshold_(empty_threshold),
      flow_names_(std::move(flow_names)) {
  if (!(capacity_ > 0.0)) {
    throw ConfigError("queue '" + id_ + "' needs a positive capacity");
  }
  inputs_.resize(flow_names_.size());
  outputs_.resize(flow_names_.size());
}

void FifoQueue::initialize(double t_start, double dt, double length,
                           std::span<const double> flow_rates,
                           double history_span) {
  if (flow_rates.size() != inputs_.size()) {
    throw std::invalid_argument("initialize: flow count mismatch");
  }
  double total = 0.0;
  for (double r : flow_rates) total += r;
  const bool congested = length > empty_threshold_ || total > capacity_;
  const double t_seed = t_start - dt;
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    double out = congested && total > 0.0
                     ? capacity_ * flow_rates[k] / total
                     : flow_rates[k];
    inputs_[k] = Trajectory(flow_rates[k]);
    outputs_[k] = Trajectory(out);
    inputs_[k].record(t_seed, flow_rates[k]);
    outputs_[k].record(t_seed, out);
  }
  double tau = length / capacity_;
  double rate = congested ? capacity_ : total;
  total_input_ = Trajectory(total);
  length_ = Trajectory(length);
  delay_ = Trajectory(tau);
  congested_ = Trajectory(congested ? 1.0 : 0.0);
  output_rate_ = Trajectory(rate);
  forward_ = Trajectory(0.0);
  total_input_.record(t_seed, total);
  length_.record(t_seed, length);
  delay_.record(t_seed, tau);
  congested_.record(t_seed, congested ? 1.0 : 0.0);
  output_rate_.record(t_seed, rate);
  double t_far = t_start - std::max(history_span, 2.0 * dt);
  forward_.record(t_far, t_far + tau);
  forward_.record(t_seed, t_seed + tau);
  last_backward_time_ = t_seed;
  have_backward_time_ = true;
}

void FifoQueue::step(double t, std::span<const double> input_rates) {
  if (input_rates.size() != inputs_.size()) {
    throw std::invalid_argument("step: flow count mismatch for queue " + id_);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    if (input_rates[k] < 0.0) {
      throw std::invalid_argument("negative input flow " +
                                  std::to_string(input_rates[k]) +
                                  " into queue " + id_);
    }
    inputs_[k].record(t, input_rates[k]);
    total += input_rates[k];
  }
  const double t_prev = length_.last_time();
  const double total_prev = total_input_.last_value();
  total_input_.record(t, total);

  // The queue is quadratic inside a step while f is stored piecewise
  // linear; a steep input (a window burst) gets sub-samples so the chord
  // error of the cumulative input stays below kChordTolerance packets.
  constexpr double kChordTolerance = 0.01;
  constexpr int kMaxSubsteps = 64;
  const double h = t - t_prev;
  const double chord = std::abs(total - total_prev) * h / 8.0;
  int n = 1;
  if (chord > kChordTolerance) {
    n = std::min(kMaxSubsteps,
                 static_cast<int>(std::ceil(std::sqrt(chord / kChordTolerance))));
  }
  if (n > 1) steep_times_.push_back(t);
  double q = length_.last_value();
  for (int m = 1; m <= n; ++m) {
    double a = total_prev + (total - total_prev) * (m - 1) / n;
    double b = total_prev + (total - total_prev) * m / n;
    double ts = m == n ? t : t_prev + h * m / n;
    QueueStep st = queue_step(q, a, b, h / n, capacity_, empty_threshold_);
    q = st.length;
    if (q > 1e12) {
      throw SimulationError("queue " + id_ + " diverged at t=" +
                            std::to_string(t));
    }
    const double tau = q / capacity_;
    length_.record(ts, q);
    delay_.record(ts, tau);
    // Rounding in a draining queue must not make f decrease.
    forward_.record(ts, std::max(ts + tau, forward_.last_value()));
    bool congested = q > empty_threshold_ || b > capacity_;
    congested_.record(ts, congested ? 1.0 : 0.0);
  }
}

bool FifoQueue::near_steep_input(double t, double width) const {
  auto it = std::lower_bound(steep_times_.begin(), steep_times_.end(),
                             t - width);
  return it != steep_times_.end() && *it <= t + width;
}

bool FifoQueue::congested_at(double t) const {
  return length_.eval(t) > empty_threshold_ ||
         total_input_.eval(t) > capacity_;
}

double FifoQueue::backward_time(double t) const {
  return forward_.invert_monotone(t);
}

double FifoQueue::backward_rate(double t) const {
  if (!congested_at(t)) return 1.0;
  double g = backward_time(t);
  double total = total_input_.eval(g);
  if (!(total > 0.0)) {
    throw InvertibilityError("queue " + id_ + ": zero input at g(" +
                             std::to_string(t) + ")=" + std::to_string(g) +
                             " while congested");
  }
  return capacity_ / total;
}

std::vector<double> FifoQueue::output_flows(double t) const {
  std::vector<double> out(inputs_.size());
  if (!congested_at(t)) {
    for (std::size_t k = 0; k < inputs_.size(); ++k) out[k] = inputs_[k].eval(t);
    return out;
  }
  double g = backward_time(t);
  double total = total_input_.eval(g);
  if (!(total > 0.0)) {
    throw InvertibilityError("queue " + id_ + ": zero input at g(" +
                             std::to_string(t) + ")=" + std::to_string(g) +
                             " while congested");
  }
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    out[k] = capacity_ * inputs_[k].eval(g) / total;
  }
  return out;
}

void FifoQueue::record_outputs(double t) {
  std::vector<double> out;
  try {
    out = output_flows(t);
    if (congested_at(t)) {
      last_backward_time_ = backward_time(t);
      have_backward_time_ = true;
    }
  } catch (const InvertibilityError&) {
    if (diagnostics_.invertibility_violations++ == 0) {
      diagnostics_.first_violation_time = t;
    }
    out.assign(inputs_.size(), 0.0);
    double total = have_backward_time_ ? total_input_.eval(last_backward_time_)
                                       : 0.0;
    for (std::size_t k = 0; k < inputs_.size(); ++k) {
      out[k] = total > 0.0
                   ? capacity_ * inputs_[k].eval(last_backward_time_) / total
                   : capacity_ / static_cast<double>(inputs_.size());
    }
  }
  double rate = 0.0;
  for (std::size_t k = 0; k < outputs_.size(); ++k) {
    outputs_[k].record(t, out[k]);
    rate += out[k];
  }
  output_rate_.record(t, rate);
}

void FifoQueue::prune_before(double t) {
  for (auto& tr : inputs_) tr.prune_before(t);
  for (auto& tr : outputs_) tr.prune_before(t);
  total_input_.prune_before(t);
  length_.prune_before(t);
  delay_.prune_before(t);
  forward_.prune_before(t);
  congested_.prune_before(t);
  output_rate_.prune_before(t);
  steep_times_.erase(steep_times_.begin(),
                     std::lower_bound(steep_times_.begin(), steep_times_.end(),
                                      t));
}

}  // namespace fluidnet
