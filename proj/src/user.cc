#include "fluidnet/user.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fluidnet {

bool is_active(double pi, double wdot, double ack_rate) {
  return pi == 0.0 && wdot + ack_rate >= 0.0;
}

double sending_flow(bool active, double wdot, double ack_rate) {
  return active ? std::max(wdot + ack_rate, 0.0) : 0.0;
}

AckBufferStep ack_buffer_step(double pi, double rho_begin, double rho_end,
                              double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ack_buffer_step: dt <= 0");
  AckBufferStep out;
  const double a = 0.5 * (rho_end - rho_begin) / dt;
  const double end = pi + rho_begin * dt + a * dt * dt;
  if (end < 0.0) {
    out.pi = end;
    return out;
  }
  // pi(x) = pi + rho_begin x + a x^2 reaches 0 inside the step.
  double x;
  if (std::abs(a) * dt < 1e-12 * (std::abs(rho_begin) + 1e-300)) {
    x = rho_begin > 0.0 ? -pi / rho_begin : dt;
  } else {
    double disc = std::max(rho_begin * rho_begin - 4.0 * a * pi, 0.0);
    double s = std::sqrt(disc);
    double q = -0.5 * (rho_begin + (rho_begin >= 0.0 ? s : -s));
    double r1 = q / a;
    double r2 = q != 0.0 ? pi / q : dt;
    x = dt;
    for (double r : {r1, r2}) {
      if (r >= 0.0 && r <= dt) x = std::min(x, r);
    }
  }
  out.pi = 0.0;
  out.resumed = end;
  out.fill_time = std::clamp(x, 0.0, dt);
  return out;
}

WindowImpulse apply_window_impulse(double pi, double delta) {
  WindowImpulse out{pi, 0.0};
  if (delta < 0.0) {
    out.pi = pi + delta;
  } else if (delta > 0.0) {
    double fill = std::min(delta, -pi);
    out.pi = pi + fill;
    out.burst = delta - fill;
  }
  return out;
}

UserModel::UserModel(std::string id, double total_delay)
    : id_(std::move(id)), total_delay_(total_delay) {}

void UserModel::initialize(double t_start, double dt, double window,
                           double rate) {
  dt_ = dt;
  pi_ = 0.0;
  active_ = true;
  prev_rho_ = rate;
  const double t = t_start - dt;
  window_ = Trajectory(window);
  wdot_ = Trajectory(0.0);
  pi_history_ = Trajectory(0.0);
  active_history_ = Trajectory(1.0);
  sending_ = Trajectory(rate);
  ack_ = Trajectory(rate);
  window_.record(t, window);
  wdot_.record(t, 0.0);
  pi_history_.record(t, 0.0);
  active_history_.record(t, 1.0);
  sending_.record(t, rate);
  ack_.record(t, rate);
  flight_ = Trajectory(0.0);
  flight_ode_ = Trajectory(0.0);
  tau_back_ = Trajectory(0.0);
  ack_residual_ = Trajectory(0.0);
  flight_started_ = false;
  silences_.clear();
  burst_times_.clear();
}

bool UserModel::near_burst(double t, double width) const {
  for (double b : burst_times_) {
    if (std::abs(t - b) <= width) return true;
  }
  return false;
}

double UserModel::step(double t, double ack, double wdot, double impulse,
                       double window) {
  const double rho = wdot + ack;
  double resumed = 0.0;
  if (!active_) {
    AckBufferStep s = ack_buffer_step(pi_, prev_rho_, rho, dt_);
    pi_ = s.pi;
    resumed = s.resumed;
    if (s.fill_time >= 0.0 && !silences_.empty() &&
        silences_.back().resume < 0.0) {
      silences_.back().resume = t - dt_ + s.fill_time;
    }
  }
  const bool was_silent = pi_ < 0.0;
  WindowImpulse imp = apply_window_impulse(pi_, impulse);
  pi_ = imp.pi;
  if (!was_silent && pi_ < 0.0) silences_.push_back({t, -1.0});
  if (was_silent && pi_ == 0.0 && !silences_.empty() &&
      silences_.back().resume < 0.0) {
    silences_.back().resume = t;  // paid back by a window increase
  }
  if (imp.burst > 0.0) burst_times_.push_back(t);
  active_ = is_active(pi_, wdot, ack);
  const double extra = (imp.burst + resumed) / dt_;
  const double send = sending_flow(active_, wdot, ack) + extra;
  fprime_ = (active_ ? wdot : -ack) + extra;
  prev_rho_ = rho;

  window_.record(t, window);
  wdot_.record(t, wdot + impulse / dt_);
  pi_history_.record(t, pi_);
  active_history_.record(t, active_ ? 1.0 : 0.0);
  sending_.record(t, send);
  ack_.record(t, ack);
  return send;
}

void UserModel::record_flight(double t, double flight_integral,
                              double tau_back, double ack_residual) {
  if (!flight_started_) {
    flight_ode_value_ = flight_integral;
    flight_started_ = true;
  } else {
    flight_ode_value_ += 0.5 * dt_ * (prev_fprime_ + fprime_);
  }
  prev_fprime_ = fprime_;
  flight_.record(t, flight_integral);
  flight_ode_.record(t, flight_ode_value_);
  tau_back_.record(t, tau_back);
  ack_residual_.record(t, ack_residual);
}

void UserModel::prune_before(double t) {
  for (Trajectory* tr : {&window_, &wdot_, &pi_history_, &active_history_,
                         &sending_, &ack_, &flight_, &flight_ode_, &tau_back_,
                         &ack_residual_}) {
    tr->prune_before(t);
  }
}

}  // namespace fluidnet
