#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dchier/scenario.hpp"
#include "dchier/solvers.hpp"

int main(int argc, char** argv) {
  using namespace dchier::cli;
  configure_logging();

  CLI::App app{"Direction-constrained hierarchical velocity control toolkit"};
  app.require_subcommand(1);
  const std::vector<std::string> solvers{"dc", "hqp", "scaling"};

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trace.csv and metrics.json");
  run_cmd->add_option("--scenario", run.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--solver", run.solver, "Backend: dc, hqp or scaling")
      ->check(CLI::IsMember(solvers))
      ->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--set", run.overrides, "Override a config value, key=value (dotted keys)");

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Run a scenario under every backend and tabulate metrics");
  cmp_cmd->add_option("--scenario", cmp.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--out", cmp.out, "Directory for compare.json, compare.txt and per-solver runs");
  cmp_cmd->add_option("--set", cmp.overrides, "Override a config value, key=value (dotted keys)");

  ServeOptions srv;
  auto* srv_cmd = app.add_subcommand("serve", "Serve a live simulation over websocket at /sim");
  srv_cmd->add_option("--scenario", srv.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  srv_cmd->add_option("--solver", srv.solver, "Initial backend")->check(CLI::IsMember(solvers))->capture_default_str();
  srv_cmd->add_option("--host", srv.host, "Bind address")->capture_default_str();
  srv_cmd->add_option("--port", srv.port, "TCP port, 0 picks a free one")->capture_default_str();
  srv_cmd->add_option("--set", srv.overrides, "Override a config value, key=value (dotted keys)");

  RangeCurveOptions rc;
  auto* rc_cmd = app.add_subcommand("range-curve", "Steady deviation chi against kappa2 as CSV");
  rc_cmd->add_option("--out", rc.out, "CSV file (stdout when omitted)");
  rc_cmd->add_option("--kappa1", rc.kappa1, "kappa1")->capture_default_str();
  rc_cmd->add_option("--forces", rc.forces, "Force magnitudes")->delimiter(',')->capture_default_str();
  rc_cmd->add_option("--kappa2-min", rc.kappa2_min)->capture_default_str();
  rc_cmd->add_option("--kappa2-max", rc.kappa2_max)->capture_default_str();
  rc_cmd->add_option("--kappa2-step", rc.kappa2_step)->capture_default_str();
  rc_cmd->add_option("--velocity", rc.v, "Robot velocity v")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*cmp_cmd) return compare_command(cmp);
    if (*srv_cmd) return serve_command(srv);
    if (*rc_cmd) return range_curve_command(rc);
  } catch (const dchier::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
