#pragma once

#include <optional>

#include "json.hpp"

#include "dchier/simulation.hpp"

namespace dchier {

struct MetricsOptions {
  std::optional<Vec3> goal;
  double goal_tolerance = 0.01;
  Vec3 goal_mask = Vec3::Ones();  // axes the goal distance is measured on
  double moving_speed = 1e-4;     // angle statistics use rows faster than this
};

struct MetricsReport {
  std::size_t ticks = 0;
  double duration = 0;
  double max_angle_dev_deg = 0;
  double mean_angle_dev_deg = 0;
  double blocked_time = 0;
  double path_length = 0;
  std::optional<double> goal_time;
  std::optional<double> recovery_time;
  Vec3 peak_chi = Vec3::Zero();  // max |v_a - v| per axis
  double peak_chi_norm = 0;
  std::size_t degenerate_ticks = 0;
  std::size_t iteration_limit_ticks = 0;
  std::size_t fallback_ticks = 0;
  Vec3 final_position = Vec3::Zero();
};

MetricsOptions metrics_options(const Scenario& scenario);
MetricsReport metrics(const TraceLog& trace, const MetricsOptions& options = {});

/// Time from the first force sign flip on an axis to the following v_a sign flip.
std::optional<double> recovery_time(const TraceLog& trace, Index axis);

nlohmann::json to_json(const MetricsReport& report);

}  // namespace dchier
