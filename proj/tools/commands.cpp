#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "dchier/metrics.hpp"
#include "dchier/scenario.hpp"
#include "dchier/trace_io.hpp"

#ifdef DCHIER_HAVE_SERVICE
#include "server.hpp"
#endif

namespace dchier::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunArtifacts {
  TraceLog trace;
  MetricsReport report;
  json summary;
};

RunArtifacts execute(const Scenario& sc, Backend backend) {
  RunArtifacts a;
  spdlog::info("running '{}' with {} ({} ticks)", sc.name, to_string(backend), sc.ticks());
  a.trace = run(sc, backend);
  a.report = metrics(a.trace, metrics_options(sc));
  a.summary = {{"scenario", sc.name},
               {"solver", std::string(to_string(backend))},
               {"metrics", to_json(a.report)},
               {"config", to_json(sc)}};
  spdlog::debug("metrics: {}", a.summary["metrics"].dump());
  return a;
}

void write_run(const fs::path& dir, const RunArtifacts& a) {
  fs::create_directories(dir);
  write_file_atomic(dir / "trace.csv", trace_csv(a.trace));
  write_file_atomic(dir / "metrics.json", a.summary.dump(2) + "\n");
}

bool too_degenerate(const MetricsReport& r) {
  return r.ticks > 0 && static_cast<double>(r.degenerate_ticks) > 0.01 * static_cast<double>(r.ticks);
}

std::string format_opt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

}  // namespace

void configure_logging() {
  const char* env = std::getenv("DCHIER_LOG");
  spdlog::set_level(spdlog::level::warn);
  if (env && *env) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("DCHIER_LOG='{}' is not a log level; keeping warn", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

int run_command(const RunOptions& opt) {
  const Scenario sc = load_scenario(opt.scenario, opt.overrides);
  const auto backend = parse_backend(opt.solver);
  if (!backend) throw ConfigError("unknown solver '" + opt.solver + "' (expected " + std::string(kBackendNames) + ")");
  const RunArtifacts a = execute(sc, *backend);
  write_run(opt.out, a);
  std::cout << "wrote " << (fs::path(opt.out) / "trace.csv").string() << " and "
            << (fs::path(opt.out) / "metrics.json").string() << "\n";
  if (too_degenerate(a.report)) {
    spdlog::error("{} of {} ticks were degenerate", a.report.degenerate_ticks, a.report.ticks);
    return kExitDegenerate;
  }
  return 0;
}

int compare_command(const CompareOptions& opt) {
  const Scenario sc = load_scenario(opt.scenario, opt.overrides);
  json table = json::array();
  std::ostringstream text;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %14s %15s %12s %10s %10s %11s\n", "solver", "max_angle_deg",
                "mean_angle_deg", "blocked_s", "goal_s", "path_m", "degenerate");
  text << line;
  bool degenerate = false;
  for (Backend b : {Backend::DirectionConstrained, Backend::Hqp, Backend::Scaling}) {
    const RunArtifacts a = execute(sc, b);
    const MetricsReport& r = a.report;
    degenerate = degenerate || too_degenerate(r);
    table.push_back({{"solver", std::string(to_string(b))}, {"metrics", to_json(r)}});
    std::snprintf(line, sizeof line, "%-8s %14.3f %15.3f %12.3f %10s %10.4f %11zu\n",
                  std::string(to_string(b)).c_str(), r.max_angle_dev_deg, r.mean_angle_dev_deg,
                  r.blocked_time, format_opt(r.goal_time).c_str(), r.path_length, r.degenerate_ticks);
    text << line;
    if (!opt.out.empty()) write_run(fs::path(opt.out) / std::string(to_string(b)), a);
  }
  std::cout << text.str();
  const json doc{{"scenario", sc.name}, {"results", table}, {"config", to_json(sc)}};
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    write_file_atomic(fs::path(opt.out) / "compare.json", doc.dump(2) + "\n");
    write_file_atomic(fs::path(opt.out) / "compare.txt", text.str());
  } else {
    std::cout << doc["results"].dump() << "\n";
  }
  return degenerate ? kExitDegenerate : 0;
}

int serve_command(const ServeOptions& opt) {
#ifdef DCHIER_HAVE_SERVICE
  const Scenario sc = load_scenario(opt.scenario, opt.overrides);
  const auto backend = parse_backend(opt.solver);
  if (!backend) throw ConfigError("unknown solver '" + opt.solver + "' (expected " + std::string(kBackendNames) + ")");
  service::Server server(sc, *backend, {opt.host, opt.port});
  server.start();
  std::cout << "serving ws://" << opt.host << ":" << server.port() << "/sim" << std::endl;
  server.wait_for_signal();
  server.stop();
  return 0;
#else
  (void)opt;
  std::cerr << "this build has no service support\n";
  return 1;
#endif
}

int range_curve_command(const RangeCurveOptions& opt) {
  if (!(opt.kappa2_step > 0.0) || opt.kappa2_max < opt.kappa2_min || !(opt.kappa2_min > 0.0))
    throw InvalidInput("range-curve: need 0 < kappa2-min <= kappa2-max and a positive step");
  std::ostringstream out;
  out << "f,kappa1,kappa2,chi\n";
  char line[128];
  for (double f : opt.forces) {
    const auto steps = static_cast<long>(std::floor((opt.kappa2_max - opt.kappa2_min) / opt.kappa2_step + 1e-9));
    for (long i = 0; i <= steps; ++i) {
      const double k2 = opt.kappa2_min + static_cast<double>(i) * opt.kappa2_step;
      const double chi = steady_deviation(f, opt.v, opt.kappa1, k2);
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", f, opt.kappa1, k2, chi);
      out << line;
    }
  }
  if (opt.out.empty()) {
    std::cout << out.str();
  } else {
    write_file_atomic(opt.out, out.str());
  }
  return 0;
}

}  // namespace dchier::cli
