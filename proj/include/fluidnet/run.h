#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fluidnet/checks.h"
#include "fluidnet/engine.h"
#include "fluidnet/packet_sim.h"
#include "fluidnet/scenario.h"

namespace fluidnet {

enum class OracleMode { kNone, kPacket, kEquilibrium, kBoth };

OracleMode parse_oracle_mode(const std::string& s);

struct RunOptions {
  OracleMode oracle = OracleMode::kNone;
  std::string out_dir;  // empty: no files
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<InitMode> init;
  int csv_stride = 1;  // write every n-th grid row
  bool log_events = false;
};

struct Metric {
  std::string name;
  double value = 0.0;
  std::string unit;
};

struct RunReport {
  std::string scenario;
  std::vector<CheckResult> checks;
  std::vector<Metric> metrics;
  std::vector<std::string> files;
  double fluid_runtime = 0.0;   // seconds
  double packet_runtime = 0.0;  // seconds, 0 if not run

  bool passed() const;
  const CheckResult* check(const std::string& name) const;
  const Metric* metric(const std::string& name) const;
};

// Preset name or path to a JSON scenario file. Throws ConfigError.
Scenario load_scenario(const std::string& name_or_path);

// Scenario with the option overrides applied.
Scenario apply_overrides(Scenario s, const RunOptions& opt);

// Oracle comparisons on finished runs; usable without run_scenario().
// Steady-state windows: [t - 0.2, t) before each window step and the last
// 0.5 s of the run.
struct EquilibriumComparison {
  std::string label;  // e.g. "b1@3s-" or "b1@end"
  int queue = -1;
  double fluid_tau = 0.0;
  double oracle_tau = 0.0;
  double relative_error = 0.0;
};
std::vector<EquilibriumComparison> compare_equilibria(const TraceSet& tr);

// RMS of fluid minus packet queue over the packet sample grid, per queue.
std::vector<double> queue_rms(const TraceSet& tr, const PacketTrace& pk);

// Largest equilibrium queue across the steady-state windows, per queue;
// the RMS normalization.
std::vector<double> equilibrium_queue_scale(const TraceSet& tr);

// Per-flow packet counts at every queue, [queue][slot][period], for periods
// [k P, (k + 1) P). packet_out stays empty without a packet trace.
// max_difference compares fluid and packet cumulative output counts at each
// period end.
struct PeriodCounts {
  std::vector<std::vector<std::vector<double>>> fluid_in, fluid_out;
  std::vector<std::vector<std::vector<double>>> packet_out;
  double max_difference = 0.0;
};
PeriodCounts period_counts(const TraceSet& tr, const PacketTrace* pk,
                           double period);

// Cumulative counts from t = 0 at each period end:
// period_end[s], in_<q>_<flow>[pkt], out_<q>_<flow>[pkt]
// and packet_out_<q>_<flow>[pkt] when packet counts are present.
void write_counts_csv(const TraceSet& tr, const PeriodCounts& pc,
                      double period, std::ostream& out);

// FAST users sharing one bottleneck: queueing delay target sum(alpha) / c
// and per-user rate alpha / tau, measured over the last 10% of the run.
struct FastComparison {
  double tau = 0.0;
  double tau_target = 0.0;
  std::vector<double> rates;
  std::vector<double> rate_targets;
  double worst_relative_error = 0.0;
};
std::optional<FastComparison> compare_fast(const TraceSet& tr);

// Fluid trace CSV: time[s],<signal>[unit],... one row per grid tick.
void write_fluid_csv(const TraceSet& tr, std::ostream& out, int stride = 1);
void write_packet_csv(const TraceSet& tr, const PacketTrace& pk,
                      std::ostream& out);

// Runs the fluid model, the requested oracles and every check; writes CSVs
// and report.json when out_dir is set.
RunReport run_scenario(const Scenario& s, const RunOptions& opt);

void print_report(const RunReport& r, std::ostream& out);

}  // namespace fluidnet
