#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dchier::cli {

struct RunOptions {
  std::string scenario;
  std::string solver = "dc";
  std::string out;
  std::vector<std::string> overrides;
};

struct CompareOptions {
  std::string scenario;
  std::string out;  // optional directory for compare.json and per-solver runs
  std::vector<std::string> overrides;
};

struct ServeOptions {
  std::string scenario;
  std::string solver = "dc";
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;
  std::vector<std::string> overrides;
};

struct RangeCurveOptions {
  std::string out;  // stdout when empty
  double kappa1 = 20.0;
  std::vector<double> forces{2.0, 5.0, 10.0, 20.0};
  double kappa2_min = 1.0;
  double kappa2_max = 100.0;
  double kappa2_step = 1.0;
  double v = 0.0;
};

/// Exit code when more than 1% of ticks ended Degenerate.
inline constexpr int kExitDegenerate = 3;

int run_command(const RunOptions& opt);
int compare_command(const CompareOptions& opt);
int serve_command(const ServeOptions& opt);
int range_curve_command(const RangeCurveOptions& opt);

/// Reads DCHIER_LOG (trace, debug, info, warn, error, off).
void configure_logging();

}  // namespace dchier::cli
