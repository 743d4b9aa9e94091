// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `acceptance_test N` evaluates criterion N only and skips
// the presets it does not need. Every preset is simulated once and its trace
// dropped before the next, so peak memory stays at one run.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "fluidnet/checks.h"
#include "fluidnet/engine.h"
#include "fluidnet/equilibrium.h"
#include "fluidnet/packet_sim.h"
#include "fluidnet/presets.h"
#include "fluidnet/run.h"

using namespace fluidnet;

namespace {

constexpr double kEquilibriumTol = 0.01;
constexpr double kRuntimeLimit = 60.0;  // seconds
constexpr double kRmsTol = 0.05;
constexpr double kCountTol = 1.0;      // packets
constexpr double kSilenceTol = 0.05;
constexpr double kConvergenceTol = 0.005;
constexpr double kFastTol = 0.02;

// Worst value seen for one criterion plus where it happened.
struct Criterion {
  std::string title;
  double worst = 0.0;
  double limit = 0.0;
  std::string where;
  bool failed = false;
  std::vector<std::string> notes;

  void observe(double value, const std::string& at, bool ok) {
    if (!ok) failed = true;
    if (where.empty() || value > worst) {
      worst = value;
      where = at;
    }
  }
  void fail(const std::string& why) {
    failed = true;
    notes.push_back(why);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool is_scheduled(const Scenario& s) {
  for (const Protocol& p : s.protocols) {
    if (p.kind != Protocol::Kind::kScheduled) return false;
  }
  return true;
}

double rms_between(const Trajectory& fluid, const PacketTrace& pk, int queue,
                   double t0, double t1) {
  double sum = 0.0;
  long n = 0;
  for (std::size_t k = 0; k < pk.times.size(); ++k) {
    double t = pk.times[k];
    if (t < t0 || t > t1) continue;
    double d = fluid.eval(t) - pk.queue[queue][k];
    sum += d * d;
    ++n;
  }
  return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (argc > 1 && (only < 1 || only > 10)) {
    std::fprintf(stderr, "usage: acceptance_test [criterion 1-10]\n");
    return 2;
  }
  auto wanted = [&](int n) { return only == 0 || only == n; };
  std::map<int, Criterion> crit;
  crit[1] = {"scenario equilibria (1-6) within 1%, runtime < 60 s"};
  crit[1].limit = kEquilibriumTol;
  crit[2] = {"fluid vs packet queue RMS (1-6) within 5% of post-step queue"};
  crit[2].limit = kRmsTol;
  crit[3] = {"square-wave cumulative per-flow counts within 1 packet"};
  crit[3].limit = kCountTol;
  crit[4] = {"window halving (7-8): silence, drain and pi sign"};
  crit[4].limit = kSilenceTol;
  crit[5] = {"static-link reduction within 2 packets, n/a otherwise"};
  crit[5].limit = kStaticLinkTolerance;
  crit[6] = {"g(f(t)) = t and g + tau(g) = t within 1e-6 s"};
  crit[6].limit = kIdentityTolerance;
  crit[7] = {"conservation within 2 packets on every preset"};
  crit[7].limit = kConservationTolerance;
  crit[8] = {"ACK-flow identity below 1% of capacity (1-2)"};
  crit[8].limit = kAckResidualFraction;
  crit[9] = {"equilibria change < 0.5% when dt halves"};
  crit[9].limit = kConvergenceTol;
  crit[10] = {"FAST equilibrium within 2% of N alpha / c and alpha / tau"};
  crit[10].limit = kFastTol;

  for (const std::string& name : preset_names()) {
    const Scenario s = preset(name);
    const int idx = name.rfind("scenario", 0) == 0 ? std::stoi(name.substr(8)) : 0;
    const bool scenario_1to6 = idx >= 1 && idx <= 6;
    const bool halving = idx == 7 || idx == 8;
    const bool numbered_preset = idx >= 1 && idx <= 8;
    const bool packet_needed = (scenario_1to6 && wanted(2)) ||
                               (halving && wanted(4)) ||
                               (name == "squarewave" && wanted(3));
    const bool needed =
        wanted(5) || wanted(6) || wanted(7) || packet_needed ||
        (scenario_1to6 && wanted(1)) || (halving && wanted(4)) ||
        (idx >= 1 && idx <= 2 && wanted(8)) ||
        (numbered_preset && wanted(9)) || (name == "fast" && wanted(10));
    if (!needed) continue;
    std::fprintf(stderr, "running %s\n", name.c_str());

    TraceSet tr = simulate(s, SimConfig::from(s));
    std::vector<CheckResult> checks = run_checks(tr);
    auto check = [&](const std::string& n) -> const CheckResult& {
      for (const CheckResult& c : checks) {
        if (c.name == n) return c;
      }
      throw std::logic_error("missing check " + n);
    };

    // 6 and 7 on every preset
    for (const char* n : {"g_of_f_identity", "delay_fixed_point"}) {
      const CheckResult& c = check(n);
      crit[6].observe(c.value, name + " " + n, c.ok());
    }
    for (const char* n : {"user_conservation", "queue_conservation"}) {
      const CheckResult& c = check(n);
      crit[7].observe(c.value, name + " " + n, c.ok());
    }

    std::vector<EquilibriumComparison> eq = compare_equilibria(tr);
    if (scenario_1to6) {
      if (eq.empty()) crit[1].fail(name + ": no equilibrium windows");
      for (const EquilibriumComparison& c : eq) {
        crit[1].observe(c.relative_error, name + " " + c.label,
                        c.relative_error <= kEquilibriumTol);
      }
      if (!(tr.runtime_seconds < kRuntimeLimit)) {
        crit[1].fail(name + " took " + num(tr.runtime_seconds) + " s");
      }
      crit[1].notes.push_back(name + " " + num(tr.runtime_seconds) + " s");
    }

    if (idx == 1 || idx == 2) {
      const CheckResult& c = check("ack_flow_identity");
      crit[8].observe(c.value, name, c.status == CheckStatus::kPass);
    }

    if (name == "staticlink") {
      StaticLinkResult r = static_link_check(tr);
      if (!r.applicable) {
        crit[5].fail("staticlink not applicable: " + r.reason);
      } else {
        crit[5].observe(r.max_deviation, name,
                        r.max_deviation <= kStaticLinkTolerance);
      }
    } else if (static_link_check(tr).applicable) {
      crit[5].fail(name + " unexpectedly applicable");
    }

    if (name == "fast") {
      std::optional<FastComparison> f = compare_fast(tr);
      if (!f) {
        crit[10].fail("fast preset not comparable");
      } else {
        crit[10].observe(f->worst_relative_error,
                         "tau " + num(f->tau) + " vs " + num(f->tau_target),
                         f->worst_relative_error <= kFastTol);
      }
    }

    if (halving) {
      // sending exactly 0 while pi < 0, and pi never positive
      const CheckResult& quiet = check("retaining_silence");
      const CheckResult& sign = check("ack_buffer_sign");
      if (!quiet.ok()) crit[4].fail(name + " sent while retaining: " + quiet.detail);
      if (!sign.ok()) crit[4].fail(name + " pi or sending sign: " + sign.detail);
      const UserModel& u = tr.users[0];
      if (u.silences().empty() || u.silences()[0].resume < 0.0) {
        crit[4].fail(name + ": fluid silence missing or unfinished");
      } else if (std::abs(u.ack_buffer().eval(u.silences()[0].resume)) > 1e-9) {
        crit[4].fail(name + ": pi not back at 0 on resume");
      }
    }

    // 2, 3 and 4 against the packet oracle
    if (is_scheduled(s) && packet_needed) {
      PacketTrace pk = packet_sim(s, PacketSimConfig::from(s));
      const double horizon = tr.time(tr.ticks - 1);
      if (scenario_1to6) {
        for (const EquilibriumComparison& c : eq) {
          if (c.label.find("@end") == std::string::npos) continue;
          double scale = c.oracle_tau * tr.network.capacity(c.queue);
          double rms = rms_between(tr.queues[c.queue].length_history(), pk,
                                   c.queue, 0.0, horizon);
          if (!(scale > 0.0)) {
            crit[2].fail(name + " " + c.label + ": empty post-step queue");
            continue;
          }
          crit[2].observe(rms / scale, name + " " + c.label,
                          rms / scale <= kRmsTol);
        }
      }
      if (name == "squarewave") {
        PeriodCounts pc = period_counts(tr, &pk, s.run.count_period);
        std::size_t periods = pc.fluid_out[0][0].size();
        if (periods < 10) crit[3].fail("only " + std::to_string(periods) + " periods");
        crit[3].observe(pc.max_difference, name,
                        pc.max_difference <= kCountTol);
      }
      if (halving) {
        const UserModel& u = tr.users[0];
        if (!u.silences().empty() && !pk.silences[0].empty()) {
          double fluid = u.silences()[0].resume - u.silences()[0].start;
          double packet = pk.silences[0][0].resume - pk.silences[0][0].start;
          double rel = std::abs(fluid - packet) / packet;
          crit[4].observe(rel, name + " silence " + num(fluid) + " s vs " +
                                   num(packet) + " s",
                          rel <= kSilenceTol);
        } else {
          crit[4].fail(name + ": no silence in one of the models");
        }
        // drain after the step, normalized by the pre-step queue
        double t_step = s.protocols[0].schedule.steps.at(0).time;
        double pre = 0.0;
        for (const EquilibriumComparison& c : eq) {
          if (c.label.find("@end") == std::string::npos) {
            pre = std::max(pre, c.oracle_tau * tr.network.capacity(c.queue));
          }
        }
        double rms = rms_between(tr.queues[0].length_history(), pk, 0, t_step,
                                 horizon);
        if (!(pre > 0.0)) {
          crit[4].fail(name + ": empty pre-step queue");
        } else {
          crit[4].observe(rms / pre, name + " drain RMS", rms / pre <= kSilenceTol);
        }
      }
    }

    // 9: same preset at dt / 2
    if (numbered_preset && wanted(9)) {
      std::vector<double> coarse;
      for (const EquilibriumComparison& c : eq) coarse.push_back(c.fluid_tau);
      tr = TraceSet();  // release the coarse trace first
      Scenario fine_s = s;
      fine_s.run.dt = s.run.dt / 2.0;
      TraceSet fine = simulate(fine_s, SimConfig::from(fine_s));
      std::vector<EquilibriumComparison> eq2 = compare_equilibria(fine);
      if (eq2.size() != coarse.size()) {
        crit[9].fail(name + ": equilibrium windows differ");
      } else {
        for (std::size_t k = 0; k < coarse.size(); ++k) {
          double a = coarse[k], b = eq2[k].fluid_tau;
          double denom = std::max(std::abs(a), std::abs(b));
          double rel = denom > 0.0 ? std::abs(a - b) / denom : 0.0;
          crit[9].observe(rel, name + " " + eq2[k].label,
                          rel < kConvergenceTol);
        }
      }
    }
  }

  // 5: runs violating one condition each report not applicable
  if (wanted(5)) {
    Scenario low = preset("staticlink");
    low.protocols[0].schedule = {20.0, {}};
    low.protocols[1].schedule = {20.0, {}};
    low.run.horizon = 1.0;
    TraceSet tr = simulate(low, SimConfig::from(low));
    StaticLinkResult r = static_link_check(tr);
    if (r.applicable) crit[5].fail("uncongested run reported applicable");
    else crit[5].notes.push_back("uncongested: " + r.reason);
  }

  int failures = 0;
  int reported = 0;
  for (auto& [n, c] : crit) {
    if (!wanted(n)) continue;
    ++reported;
    bool pass = !c.failed && !c.where.empty();
    if (c.where.empty() && !c.failed) c.notes.push_back("no observations");
    if (!pass) ++failures;
    std::printf("%s criterion %2d: %s | worst %s (limit %s) at %s\n",
                pass ? "PASS" : "FAIL", n, c.title.c_str(), num(c.worst).c_str(),
                num(c.limit).c_str(), c.where.c_str());
    for (const std::string& note : c.notes) {
      std::printf("      %s\n", note.c_str());
    }
  }
  std::printf("%d of %d criteria passed\n", reported - failures, reported);
  return failures == 0 ? 0 : 1;
}
