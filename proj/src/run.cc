#include "fluidnet/run.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fluidnet/equilibrium.h"
#include "fluidnet/errors.h"
#include "fluidnet/presets.h"

namespace fluidnet {
namespace {

namespace fs = std::filesystem;

// Interval used for steady-state averages before a step and at the end.
constexpr double kPreStepWindow = 0.2;
constexpr double kFinalWindow = 0.5;

constexpr double kEquilibriumRelTol = 0.01;
constexpr double kPacketRmsTol = 0.05;
constexpr double kSilenceRelTol = 0.05;
constexpr double kPeriodCountTol = 1.0;
constexpr double kFastRelTol = 0.02;

bool all_scheduled(const Scenario& s) {
  for (const Protocol& p : s.protocols) {
    if (p.kind != Protocol::Kind::kScheduled) return false;
  }
  return true;
}

std::vector<double> step_times(const Scenario& s) {
  std::set<double> times;
  for (const Protocol& p : s.protocols) {
    if (p.kind != Protocol::Kind::kScheduled) continue;
    for (const WindowStep& st : p.schedule.steps) {
      if (st.time > 0.0 && st.time < s.run.horizon) times.insert(st.time);
    }
  }
  return {times.begin(), times.end()};
}

double mean_over(const Trajectory& tr, double t0, double t1) {
  double width = t1 - t0;
  return width > 0.0 ? tr.integrate(t0, t1) / width : tr.eval(t1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

CheckResult bound_check(const std::string& name, double value, double limit,
                        std::string detail = {}) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.limit = limit;
  c.status = value <= limit ? CheckStatus::kPass : CheckStatus::kFail;
  c.detail = std::move(detail);
  return c;
}

struct Column {
  std::string header;
  const Trajectory* trajectory;
};

std::vector<Column> fluid_columns(const TraceSet& tr) {
  std::vector<Column> cols;
  for (const UserModel& u : tr.users) {
    const std::string& id = u.id();
    cols.push_back({"w_" + id + "[pkt]", &u.window()});
    cols.push_back({"wdot_" + id + "[pkt/s]", &u.wdot()});
    cols.push_back({"pi_" + id + "[pkt]", &u.ack_buffer()});
    cols.push_back({"active_" + id + "[1]", &u.active_history()});
    cols.push_back({"send_" + id + "[pkt/s]", &u.sending()});
    cols.push_back({"ack_" + id + "[pkt/s]", &u.ack()});
    cols.push_back({"flight_" + id + "[pkt]", &u.flight()});
    cols.push_back({"flight_ode_" + id + "[pkt]", &u.flight_ode()});
    cols.push_back({"tau_back_" + id + "[s]", &u.tau_back()});
  }
  for (std::size_t j = 0; j < tr.queues.size(); ++j) {
    const FifoQueue& q = tr.queues[j];
    const std::string& id = q.id();
    cols.push_back({"q_" + id + "[pkt]", &q.length_history()});
    cols.push_back({"tau_" + id + "[s]", &q.delay_history()});
    cols.push_back({"congested_" + id + "[1]", &q.congested_history()});
    cols.push_back({"r_" + id + "[pkt/s]", &q.output_rate_history()});
    cols.push_back({"eta_" + id + "[pkt/s]", &tr.eta[j]});
    for (std::size_t l = 0; l < q.flow_count(); ++l) {
      cols.push_back(
          {"in_" + id + "_" + q.flow_name(l) + "[pkt/s]", &q.input(l)});
      cols.push_back(
          {"out_" + id + "_" + q.flow_name(l) + "[pkt/s]", &q.output(l)});
    }
  }
  for (const CrossTrace& x : tr.cross) {
    cols.push_back({"cross_" + x.id + "[pkt/s]", &x.rate});
  }
  return cols;
}

}  // namespace

OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "none") return OracleMode::kNone;
  if (s == "packet") return OracleMode::kPacket;
  if (s == "equilibrium") return OracleMode::kEquilibrium;
  if (s == "both") return OracleMode::kBoth;
  throw ConfigError("unknown oracle '" + s +
                    "' (none | packet | equilibrium | both)");
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.ok(); });
}

const CheckResult* RunReport::check(const std::string& name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Metric* RunReport::metric(const std::string& name) const {
  for (const Metric& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (is_preset(name_or_path)) return preset(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) {
    throw ConfigError("'" + name_or_path +
                      "' is neither a preset nor a readable file");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario apply_overrides(Scenario s, const RunOptions& opt) {
  if (opt.dt) s.run.dt = *opt.dt;
  if (opt.horizon) s.run.horizon = *opt.horizon;
  if (opt.init) s.run.init = *opt.init;
  s.validate();
  return s;
}

std::vector<EquilibriumComparison> compare_equilibria(const TraceSet& tr) {
  std::vector<EquilibriumComparison> out;
  const Scenario& s = tr.scenario;
  if (tr.network.user_count() == 0 || !all_scheduled(s)) return out;
  const double horizon = tr.time(tr.ticks - 1);

  auto compare = [&](const std::string& tag, double t0, double t1,
                     double windows_at) {
    EquilibriumProblem p{&tr.network, windows_before(s, windows_at),
                         cross_fractions(s, tr.network, t1)};
    EquilibriumResult eq = equilibrium_queue(p);
    for (int j = 0; j < tr.network.queue_count(); ++j) {
      EquilibriumComparison c;
      c.label = tr.network.queue_id(j) + "@" + tag;
      c.queue = j;
      c.fluid_tau = mean_over(tr.queues[j].delay_history(), t0, t1);
      c.oracle_tau = eq.tau[j];
      c.relative_error =
          c.oracle_tau > 0.0
              ? std::abs(c.fluid_tau - c.oracle_tau) / c.oracle_tau
              : c.fluid_tau * tr.network.capacity(j);
      out.push_back(c);
    }
  };
  for (double ts : step_times(s)) {
    compare(fmt(ts) + "s-", std::max(0.0, ts - kPreStepWindow), ts - tr.config.dt,
            ts);
  }
  compare("end", std::max(0.0, horizon - kFinalWindow), horizon,
          horizon + 1.0);
  return out;
}

std::vector<double> equilibrium_queue_scale(const TraceSet& tr) {
  std::vector<double> scale(tr.network.queue_count(), 0.0);
  for (const EquilibriumComparison& c : compare_equilibria(tr)) {
    scale[c.queue] = std::max(scale[c.queue],
                              c.oracle_tau * tr.network.capacity(c.queue));
  }
  return scale;
}

std::vector<double> queue_rms(const TraceSet& tr, const PacketTrace& pk) {
  std::vector<double> rms(tr.network.queue_count(), 0.0);
  const double horizon = tr.time(tr.ticks - 1);
  for (int j = 0; j < tr.network.queue_count(); ++j) {
    double sum = 0.0;
    long n = 0;
    for (std::size_t k = 0; k < pk.times.size(); ++k) {
      double t = pk.times[k];
      if (t > horizon) break;
      double d = tr.queues[j].length_history().eval(t) - pk.queue[j][k];
      sum += d * d;
      ++n;
    }
    rms[j] = n > 0 ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
  }
  return rms;
}

PeriodCounts period_counts(const TraceSet& tr, const PacketTrace* pk,
                           double period) {
  PeriodCounts pc;
  const double horizon = tr.time(tr.ticks - 1);
  const int periods = static_cast<int>(std::floor(horizon / period + 1e-9));
  const int Q = tr.network.queue_count();
  pc.fluid_in.resize(Q);
  pc.fluid_out.resize(Q);
  if (pk) pc.packet_out.resize(Q);
  for (int j = 0; j < Q; ++j) {
    const FifoQueue& q = tr.queues[j];
    for (std::size_t l = 0; l < q.flow_count(); ++l) {
      std::vector<double> fin, fout, pout;
      double cum_fluid = 0.0, cum_packet = 0.0;
      for (int k = 0; k < periods; ++k) {
        double t0 = k * period, t1 = (k + 1) * period;
        fin.push_back(q.input(l).integrate(t0, t1));
        fout.push_back(q.output(l).integrate(t0, t1));
        cum_fluid += fout.back();
        if (!pk) continue;
        pout.push_back(static_cast<double>(
            pk->departures_between(j, static_cast<int>(l), t0, t1)));
        cum_packet += pout.back();
        pc.max_difference =
            std::max(pc.max_difference, std::abs(cum_fluid - cum_packet));
      }
      pc.fluid_in[j].push_back(fin);
      pc.fluid_out[j].push_back(fout);
      if (pk) pc.packet_out[j].push_back(pout);
    }
  }
  return pc;
}

void write_counts_csv(const TraceSet& tr, const PeriodCounts& pc,
                      double period, std::ostream& out) {
  const bool packets = !pc.packet_out.empty();
  out << "period_end[s]";
  for (int j = 0; j < tr.network.queue_count(); ++j) {
    for (std::size_t l = 0; l < tr.queues[j].flow_count(); ++l) {
      std::string tag = tr.network.queue_id(j) + "_" + tr.queues[j].flow_name(l);
      out << ",in_" << tag << "[pkt],out_" << tag << "[pkt]";
      if (packets) out << ",packet_out_" << tag << "[pkt]";
    }
  }
  out << '\n' << std::setprecision(10);
  const std::size_t periods =
      pc.fluid_in.empty() || pc.fluid_in[0].empty() ? 0
                                                     : pc.fluid_in[0][0].size();
  // running sums, same layout as the columns
  std::vector<double> sums;
  for (std::size_t k = 0; k < periods; ++k) {
    out << static_cast<double>(k + 1) * period;
    std::size_t c = 0;
    for (std::size_t j = 0; j < pc.fluid_in.size(); ++j) {
      for (std::size_t l = 0; l < pc.fluid_in[j].size(); ++l) {
        double v[3] = {pc.fluid_in[j][l][k], pc.fluid_out[j][l][k],
                       packets ? pc.packet_out[j][l][k] : 0.0};
        for (int m = 0; m < (packets ? 3 : 2); ++m, ++c) {
          if (sums.size() <= c) sums.push_back(0.0);
          sums[c] += v[m];
          out << ',' << sums[c];
        }
      }
    }
    out << '\n';
  }
}

std::optional<FastComparison> compare_fast(const TraceSet& tr) {
  const Network& n = tr.network;
  if (n.queue_count() != 1 || n.user_count() == 0 || n.cross_count() > 0) {
    return std::nullopt;
  }
  for (const Protocol& p : tr.scenario.protocols) {
    if (p.kind != Protocol::Kind::kFast) return std::nullopt;
  }
  const double horizon = tr.time(tr.ticks - 1);
  const double t0 = 0.9 * horizon;
  FastComparison f;
  double alpha_sum = 0.0;
  for (const Protocol& p : tr.scenario.protocols) alpha_sum += p.fast.alpha;
  f.tau = mean_over(tr.queues[0].delay_history(), t0, horizon);
  f.tau_target = alpha_sum / n.capacity(0);
  f.worst_relative_error = std::abs(f.tau - f.tau_target) / f.tau_target;
  for (int i = 0; i < n.user_count(); ++i) {
    double rate = mean_over(tr.users[i].sending(), t0, horizon);
    double target = tr.scenario.protocols[i].fast.alpha / f.tau_target;
    f.rates.push_back(rate);
    f.rate_targets.push_back(target);
    f.worst_relative_error =
        std::max(f.worst_relative_error, std::abs(rate - target) / target);
  }
  return f;
}

void write_fluid_csv(const TraceSet& tr, std::ostream& out, int stride) {
  std::vector<Column> cols = fluid_columns(tr);
  out << "time[s]";
  for (const Column& c : cols) out << ',' << c.header;
  out << '\n';
  out << std::setprecision(10);
  stride = std::max(stride, 1);
  for (std::size_t k = 0; k < tr.ticks; k += static_cast<std::size_t>(stride)) {
    double t = tr.time(k);
    out << t;
    for (const Column& c : cols) out << ',' << c.trajectory->eval(t);
    out << '\n';
  }
}

void write_packet_csv(const TraceSet& tr, const PacketTrace& pk,
                      std::ostream& out) {
  const Network& n = tr.network;
  out << "time[s]";
  for (int j = 0; j < n.queue_count(); ++j) out << ",q_" << n.queue_id(j) << "[pkt]";
  for (int i = 0; i < n.user_count(); ++i) {
    out << ",w_" << n.user_id(i) << "[pkt],flight_" << n.user_id(i)
        << "[pkt],sent_" << n.user_id(i) << "[pkt],acked_" << n.user_id(i)
        << "[pkt]";
  }
  for (int j = 0; j < n.queue_count(); ++j) {
    for (std::size_t l = 0; l < tr.queues[j].flow_count(); ++l) {
      const std::string tag = n.queue_id(j) + "_" + tr.queues[j].flow_name(l);
      out << ",arrived_" << tag << "[pkt],departed_" << tag << "[pkt]";
    }
  }
  out << '\n' << std::setprecision(10);
  for (std::size_t k = 0; k < pk.times.size(); ++k) {
    out << pk.times[k];
    for (int j = 0; j < n.queue_count(); ++j) out << ',' << pk.queue[j][k];
    for (int i = 0; i < n.user_count(); ++i) {
      out << ',' << pk.window[i][k] << ',' << pk.flight[i][k] << ','
          << pk.sent[i][k] << ',' << pk.acked[i][k];
    }
    for (int j = 0; j < n.queue_count(); ++j) {
      for (std::size_t l = 0; l < pk.arrivals[j].size(); ++l) {
        out << ',' << pk.arrivals[j][l][k] << ',' << pk.departures[j][l][k];
      }
    }
    out << '\n';
  }
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& opt) {
  const Scenario s = apply_overrides(scenario, opt);
  RunReport report;
  report.scenario = s.name;

  TraceSet tr = simulate(s, SimConfig::from(s));
  report.fluid_runtime = tr.runtime_seconds;
  report.checks = run_checks(tr);
  report.metrics.push_back({"fluid_runtime", tr.runtime_seconds, "s"});
  report.metrics.push_back(
      {"invertibility_violations",
       static_cast<double>(tr.invertibility_violations()), "1"});
  for (const UserModel& u : tr.users) {
    for (const Silence& sl : u.silences()) {
      report.metrics.push_back({"fluid_silence_start_" + u.id(), sl.start, "s"});
      report.metrics.push_back({"fluid_resume_" + u.id(), sl.resume, "s"});
    }
  }

  const bool want_eq = opt.oracle == OracleMode::kEquilibrium ||
                       opt.oracle == OracleMode::kBoth;
  const bool want_packet =
      opt.oracle == OracleMode::kPacket || opt.oracle == OracleMode::kBoth;

  if (want_eq) {
    for (const EquilibriumComparison& c : compare_equilibria(tr)) {
      report.metrics.push_back({"tau_fluid_" + c.label, c.fluid_tau, "s"});
      report.metrics.push_back({"tau_oracle_" + c.label, c.oracle_tau, "s"});
      report.checks.push_back(bound_check("equilibrium_" + c.label,
                                          c.relative_error, kEquilibriumRelTol));
    }
    if (auto f = compare_fast(tr)) {
      report.metrics.push_back({"fast_tau", f->tau, "s"});
      report.metrics.push_back({"fast_tau_target", f->tau_target, "s"});
      for (std::size_t i = 0; i < f->rates.size(); ++i) {
        report.metrics.push_back(
            {"fast_rate_" + tr.users[i].id(), f->rates[i], "pkt/s"});
      }
      report.checks.push_back(bound_check(
          "fast_equilibrium", f->worst_relative_error, kFastRelTol));
    }
  }

  std::optional<PacketTrace> pk;
  if (want_packet) {
    bool fast = !all_scheduled(s);
    if (fast) {
      CheckResult c;
      c.name = "packet_oracle";
      c.detail = "packet oracle does not model FAST";
      report.checks.push_back(c);
    } else {
      auto start = std::chrono::steady_clock::now();
      PacketSimConfig pc = PacketSimConfig::from(s);
      pc.log_events = opt.log_events;
      pk = packet_sim(s, pc);
      report.packet_runtime = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
      report.metrics.push_back({"packet_runtime", report.packet_runtime, "s"});

      std::vector<double> rms = queue_rms(tr, *pk);
      std::vector<double> scale = equilibrium_queue_scale(tr);
      for (int j = 0; j < tr.network.queue_count(); ++j) {
        const std::string& id = tr.network.queue_id(j);
        report.metrics.push_back({"queue_rms_" + id, rms[j], "pkt"});
        if (scale[j] > 0.0) {
          report.checks.push_back(bound_check("packet_queue_rms_" + id,
                                              rms[j] / scale[j], kPacketRmsTol,
                                              "normalized by " + fmt(scale[j]) +
                                                  " pkt"));
        }
      }
      for (int i = 0; i < tr.network.user_count(); ++i) {
        const auto& fs_ = tr.users[i].silences();
        const auto& ps = pk->silences[i];
        if (fs_.empty() || ps.empty()) continue;
        double fluid = fs_[0].resume - fs_[0].start;
        double packet = ps[0].resume - ps[0].start;
        report.metrics.push_back(
            {"silence_fluid_" + tr.users[i].id(), fluid, "s"});
        report.metrics.push_back(
            {"silence_packet_" + tr.users[i].id(), packet, "s"});
        double rel = fs_[0].resume < 0.0 || ps[0].resume < 0.0
                         ? 1.0
                         : std::abs(fluid - packet) / packet;
        report.checks.push_back(
            bound_check("silence_" + tr.users[i].id(), rel, kSilenceRelTol));
      }
      if (s.run.count_period > 0.0) {
        PeriodCounts pc = period_counts(tr, &*pk, s.run.count_period);
        report.checks.push_back(bound_check(
            "flow_separation_counts", pc.max_difference, kPeriodCountTol));
      }
    }
  }

  if (!opt.out_dir.empty()) {
    fs::create_directories(opt.out_dir);
    auto path = [&](const std::string& f) {
      return (fs::path(opt.out_dir) / f).string();
    };
    {
      std::ofstream out(path("fluid.csv"));
      write_fluid_csv(tr, out, opt.csv_stride);
      report.files.push_back(path("fluid.csv"));
    }
    if (pk) {
      std::ofstream out(path("packet.csv"));
      write_packet_csv(tr, *pk, out);
      report.files.push_back(path("packet.csv"));
      if (opt.log_events) {
        std::ofstream ev(path("events.csv"));
        write_event_log(*pk, tr.network, ev);
        report.files.push_back(path("events.csv"));
      }
    }
    if (s.run.count_period > 0.0) {
      PeriodCounts pc =
          period_counts(tr, pk ? &*pk : nullptr, s.run.count_period);
      std::ofstream out(path("counts.csv"));
      write_counts_csv(tr, pc, s.run.count_period, out);
      report.files.push_back(path("counts.csv"));
    }
    nlohmann::json j;
    j["scenario"] = report.scenario;
    j["passed"] = report.passed();
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& c : report.checks) {
      j["checks"].push_back({{"name", c.name},
                             {"status", to_string(c.status)},
                             {"value", c.value},
                             {"limit", c.limit},
                             {"detail", c.detail}});
    }
    j["metrics"] = nlohmann::json::array();
    for (const Metric& m : report.metrics) {
      j["metrics"].push_back(
          {{"name", m.name}, {"value", m.value}, {"unit", m.unit}});
    }
    report.files.push_back(path("report.json"));
    j["files"] = report.files;
    std::ofstream out(path("report.json"));
    out << j.dump(2) << '\n';
  }
  return report;
}

void print_report(const RunReport& r, std::ostream& out) {
  out << "scenario " << r.scenario << '\n';
  for (const CheckResult& c : r.checks) {
    out << "  " << std::left << std::setw(15) << to_string(c.status)
        << std::setw(32) << c.name;
    if (c.status != CheckStatus::kNotApplicable) {
      out << fmt(c.value) << " (limit " << fmt(c.limit) << ")";
    }
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
  for (const Metric& m : r.metrics) {
    out << "  metric " << m.name << " = " << fmt(m.value);
    if (m.unit != "1") out << ' ' << m.unit;
    out << '\n';
  }
  for (const std::string& f : r.files) out << "  wrote " << f << '\n';
}

}  // namespace fluidnet
