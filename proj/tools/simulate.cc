// simulate <scenario|preset> [options]
// Exit status: 0 all checks pass, 1 a check failed, 2 usage or runtime error.
#include <iostream>

#include <CLI11.hpp>

#include "fluidnet/errors.h"
#include "fluidnet/presets.h"
#include "fluidnet/run.h"
#include "fluidnet/scenario.h"

int main(int argc, char** argv) {
  using namespace fluidnet;
  CLI::App app{"Fluid-flow network simulator"};
  app.name("simulate");

  std::string target;
  double dt = 0.0, horizon = 0.0;
  std::string oracle = "none", init;
  RunOptions opt;
  bool print_scenario = false, list = false;

  app.add_option("scenario", target, "preset name or scenario JSON file");
  app.add_option("--dt", dt, "time step [s]")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "simulated time [s]")
      ->check(CLI::PositiveNumber);
  app.add_option("--oracle", oracle, "none | packet | equilibrium | both")
      ->check(CLI::IsMember({"none", "packet", "equilibrium", "both"}));
  app.add_option("--out", opt.out_dir, "directory for CSV and report.json");
  app.add_option("--init", init, "cold | equilibrium")
      ->check(CLI::IsMember({"cold", "equilibrium"}));
  app.add_option("--csv-stride", opt.csv_stride, "write every n-th fluid row")
      ->check(CLI::PositiveNumber);
  app.add_flag("--log-events", opt.log_events, "write packet events.csv");
  app.add_flag("--print-scenario", print_scenario,
               "print the resolved scenario as JSON and exit");
  app.add_flag("--list", list, "list presets and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list) {
    for (const std::string& p : preset_names()) {
      std::cout << p << "  " << preset(p).description << '\n';
    }
    return 0;
  }
  if (target.empty()) {
    std::cerr << "simulate: missing scenario (try --list)\n";
    return 2;
  }

  try {
    if (dt > 0.0) opt.dt = dt;
    if (horizon > 0.0) opt.horizon = horizon;
    if (!init.empty()) {
      opt.init = init == "cold" ? InitMode::kCold : InitMode::kEquilibrium;
    }
    opt.oracle = parse_oracle_mode(oracle);
    Scenario s = apply_overrides(load_scenario(target), opt);
    if (print_scenario) {
      std::cout << serialize_scenario(s) << '\n';
      return 0;
    }
    RunReport r = run_scenario(s, opt);
    print_report(r, std::cout);
    return r.passed() ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 2;
  }
}
