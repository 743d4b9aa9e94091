#include "fluidnet/checks.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fluidnet {
namespace {

CheckResult make(const std::string& name, double value, double limit,
                 std::string detail = {}) {
  CheckResult r;
  r.name = name;
  r.value = value;
  r.limit = limit;
  r.status = value <= limit ? CheckStatus::kPass : CheckStatus::kFail;
  r.detail = std::move(detail);
  return r;
}

CheckResult not_applicable(const std::string& name, std::string why) {
  CheckResult r;
  r.name = name;
  r.status = CheckStatus::kNotApplicable;
  r.detail = std::move(why);
  return r;
}

// Tracks the worst deviation and where it happened.
struct Worst {
  double value = 0.0;
  std::string where;

  void update(double v, const std::string& what, double t) {
    if (v > value) {
      value = v;
      where = what + " at t=" + std::to_string(t);
    }
  }
};

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kNotApplicable:
      return "not_applicable";
  }
  return "?";
}

CheckResult check_user_conservation(const TraceSet& tr, double tol) {
  const char* name = "user_conservation";
  if (tr.config.prune_history) return not_applicable(name, "history pruned");
  Worst worst;
  for (const UserModel& u : tr.users) {
    const double f0 = u.flight().eval(0.0);
    for (std::size_t k = 0; k < tr.ticks; ++k) {
      double t = tr.time(k);
      double sent = u.sending().integrate(0.0, t);
      double acked = u.ack().integrate(0.0, t);
      double dev = std::abs(sent - acked - (u.flight().eval(t) - f0));
      worst.update(dev, u.id(), t);
    }
  }
  return make(name, worst.value, tol, worst.where);
}

CheckResult check_queue_conservation(const TraceSet& tr, double tol) {
  const char* name = "queue_conservation";
  if (tr.config.prune_history) return not_applicable(name, "history pruned");
  Worst worst;
  for (const FifoQueue& q : tr.queues) {
    std::vector<double> content0(q.flow_count());
    const double g0 = q.backward_time(0.0);
    for (std::size_t l = 0; l < q.flow_count(); ++l) {
      content0[l] = q.input(l).integrate(g0, 0.0);
    }
    for (std::size_t k = 0; k < tr.ticks; ++k) {
      double t = tr.time(k);
      double g = q.backward_time(t);
      double sum = 0.0;
      for (std::size_t l = 0; l < q.flow_count(); ++l) {
        double content = q.input(l).integrate(g, t);
        double balance = content0[l] + q.input(l).integrate(0.0, t) -
                         q.output(l).integrate(0.0, t);
        worst.update(std::abs(balance - content),
                     q.id() + "/" + q.flow_name(l), t);
        worst.update(-balance, q.id() + "/" + q.flow_name(l) + " negative", t);
        sum += content;
      }
      worst.update(std::abs(sum - q.length_history().eval(t)),
                   q.id() + " total", t);
    }
  }
  return make(name, worst.value, tol, worst.where);
}

CheckResult check_flight_agreement(const TraceSet& tr, double tol) {
  Worst worst;
  for (const UserModel& u : tr.users) {
    const Trajectory& a = u.flight();
    const Trajectory& b = u.flight_ode();
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst.update(std::abs(a.value_at(k) - b.value_at(k)), u.id(),
                   a.time_at(k));
    }
  }
  return make("flight_agreement", worst.value, tol, worst.where);
}

CheckResult check_backward_of_forward(const TraceSet& tr, double tol) {
  Worst worst;
  for (const FifoQueue& q : tr.queues) {
    const Trajectory& f = q.forward_map();
    for (std::size_t m = 1; m < f.size(); ++m) {
      double t = f.time_at(m);
      if (t < 0.0 || !(f.value_at(m) > f.value_at(m - 1))) continue;
      worst.update(std::abs(q.backward_time(f.value_at(m)) - t), q.id(), t);
    }
  }
  return make("g_of_f_identity", worst.value, tol, worst.where);
}

CheckResult check_delay_fixed_point(const TraceSet& tr, double tol) {
  Worst worst;
  for (const FifoQueue& q : tr.queues) {
    const Trajectory& c = q.congested_history();
    const double first = q.forward_map().value_at(0);
    for (std::size_t m = 0; m < c.size(); ++m) {
      double t = c.time_at(m);
      if (t < 0.0 || c.value_at(m) < 0.5 || t < first) continue;
      double g = q.backward_time(t);
      double dev = std::abs(g + q.delay_history().eval(g) - t);
      worst.update(dev, q.id(), t);
    }
  }
  return make("delay_fixed_point", worst.value, tol, worst.where);
}

double ack_flow_identity_check(const TraceSet& tr, int user, double t) {
  CircuitBackward b = backward_circuit(tr.network, tr.queues, user, t);
  if (!b.rate_defined) return 0.0;
  const UserModel& u = tr.users[user];
  return std::abs(u.ack().eval(t) - b.rate * u.sending().eval(b.time));
}

CheckResult check_ack_identity(const TraceSet& tr, double fraction) {
  double worst_ratio = 0.0;
  Worst worst;
  for (int i = 0; i < tr.network.user_count(); ++i) {
    double cap = std::numeric_limits<double>::infinity();
    for (int j : tr.network.circuit_of(i).queues) {
      cap = std::min(cap, tr.network.capacity(j));
    }
    const Trajectory& r = tr.users[i].ack_residual();
    for (std::size_t k = 0; k < r.size(); ++k) {
      double ratio = r.value_at(k) / cap;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst.update(r.value_at(k), tr.users[i].id(), r.time_at(k));
      }
    }
  }
  std::string where = worst.where.empty() ? "" : worst.where + " (" +
                                                    std::to_string(worst.value) +
                                                    " pkt/s)";
  bool multi_hop = false;
  for (int i = 0; i < tr.network.user_count(); ++i) {
    multi_hop = multi_hop || tr.network.circuit_of(i).queues.size() > 1;
  }
  if (multi_hop) {
    // Composed through several queues, echoes of a burst are only a few
    // ticks wide and the pointwise residual does not shrink with dt.
    CheckResult r = not_applicable(
        "ack_flow_identity", "multi-queue circuit, diagnostic only: " +
                                 std::to_string(100.0 * worst_ratio) +
                                 "% of c at " + where);
    r.value = worst_ratio;
    r.limit = fraction;
    return r;
  }
  return make("ack_flow_identity", worst_ratio, fraction, where);
}

CheckResult check_ack_buffer_sign(const TraceSet& tr) {
  Worst worst;
  for (const UserModel& u : tr.users) {
    const Trajectory& pi = u.ack_buffer();
    for (std::size_t k = 0; k < pi.size(); ++k) {
      worst.update(pi.value_at(k), u.id() + " pi", pi.time_at(k));
    }
    const Trajectory& s = u.sending();
    for (std::size_t k = 0; k < s.size(); ++k) {
      worst.update(-s.value_at(k), u.id() + " sending", s.time_at(k));
    }
  }
  return make("ack_buffer_sign", worst.value, 0.0, worst.where);
}

CheckResult check_retaining_silence(const TraceSet& tr) {
  Worst worst;
  for (const UserModel& u : tr.users) {
    const Trajectory& pi = u.ack_buffer();
    const Trajectory& s = u.sending();
    for (std::size_t k = 0; k < pi.size(); ++k) {
      if (pi.value_at(k) < 0.0) {
        worst.update(std::abs(s.value_at(k)), u.id(), s.time_at(k));
      }
    }
  }
  return make("retaining_silence", worst.value, 0.0, worst.where);
}

StaticLinkResult static_link_check(const TraceSet& tr) {
  StaticLinkResult r;
  const Network& n = tr.network;
  if (n.queue_count() != 1 || n.user_count() == 0) {
    r.reason = "needs exactly one queue and at least one user";
    return r;
  }
  if (n.cross_count() > 0) {
    r.reason = "cross traffic present";
    return r;
  }
  const double tf = n.circuit_of(0).hop_delays.front();
  const double tb = n.circuit_of(0).hop_delays.back();
  for (int i = 1; i < n.user_count(); ++i) {
    const Circuit& c = n.circuit_of(i);
    if (std::abs(c.hop_delays.front() - tf) > 1e-12 ||
        std::abs(c.hop_delays.back() - tb) > 1e-12) {
      r.reason = "propagation delays are not homogeneous";
      return r;
    }
  }
  const FifoQueue& q = tr.queues[0];
  const Trajectory& cong = q.congested_history();
  for (std::size_t m = 0; m < cong.size(); ++m) {
    if (cong.time_at(m) >= 0.0 && cong.value_at(m) < 0.5) {
      r.reason = "queue not congested at t=" + std::to_string(cong.time_at(m));
      return r;
    }
  }
  for (const UserModel& u : tr.users) {
    const Trajectory& a = u.active_history();
    for (std::size_t m = 0; m < a.size(); ++m) {
      if (a.time_at(m) >= 0.0 && a.value_at(m) < 0.5) {
        r.reason = "user " + u.id() + " retaining ACKs at t=" +
                   std::to_string(a.time_at(m));
        return r;
      }
    }
  }
  r.applicable = true;
  const double c = q.capacity();
  const Trajectory& tau = q.delay_history();
  for (std::size_t k = 0; k < tr.ticks; ++k) {
    double t = tr.time(k);
    double windows = 0.0;
    for (const UserModel& u : tr.users) windows += u.window().eval(t - tf);
    double dev = std::abs(c * tau.eval(t) - windows + c * (tf + tb));
    r.max_deviation = std::max(r.max_deviation, dev);
  }
  return r;
}

CheckResult check_static_link(const TraceSet& tr, double tol) {
  StaticLinkResult s = static_link_check(tr);
  if (!s.applicable) return not_applicable("static_link", s.reason);
  return make("static_link", s.max_deviation, tol);
}

std::vector<CheckResult> run_checks(const TraceSet& tr) {
  return {
      check_user_conservation(tr),  check_queue_conservation(tr),
      check_flight_agreement(tr),   check_backward_of_forward(tr),
      check_delay_fixed_point(tr),  check_ack_identity(tr),
      check_ack_buffer_sign(tr),    check_retaining_silence(tr),
      check_static_link(tr),
  };
}

}  // namespace fluidnet
