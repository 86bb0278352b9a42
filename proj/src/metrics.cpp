#include "dchier/metrics.hpp"

#include <cmath>

namespace dchier {

MetricsOptions metrics_options(const Scenario& scenario) {
  MetricsOptions o;
  o.goal = scenario.goal();
  o.goal_tolerance = scenario.goal_tolerance;
  o.goal_mask = Vec3::Zero();
  for (Index a : scenario.interaction_axes())
    if (a < 3) o.goal_mask(a) = 1.0;
  return o;
}

std::optional<double> recovery_time(const TraceLog& trace, Index axis) {
  const auto& rows = trace.rows;
  double initial = 0.0;
  std::size_t i = 0;
  for (; i < rows.size(); ++i) {
    if (std::abs(rows[i].f(axis)) > kBlockedForce) {
      initial = sign_of(rows[i].f(axis));
      break;
    }
  }
  if (initial == 0.0) return std::nullopt;
  for (; i < rows.size() && rows[i].f(axis) * initial >= 0.0; ++i) {
  }
  if (i == rows.size()) return std::nullopt;
  const double flip = rows[i].t;
  for (; i < rows.size(); ++i)
    if (rows[i].v_a(axis) * initial < 0.0) return rows[i].t - flip;
  return std::nullopt;
}

MetricsReport metrics(const TraceLog& trace, const MetricsOptions& options) {
  MetricsReport r;
  const auto& rows = trace.rows;
  r.ticks = rows.size();
  r.duration = static_cast<double>(rows.size()) * trace.dt;
  if (rows.empty()) return r;

  double angle_sum = 0.0;
  std::size_t moving = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TraceRow& row = rows[i];
    if (row.v.norm() > options.moving_speed) {
      r.max_angle_dev_deg = std::max(r.max_angle_dev_deg, row.angle_dev_deg);
      angle_sum += row.angle_dev_deg;
      ++moving;
    }
    if (row.v.norm() < kBlockedSpeed && row.f.norm() > kBlockedForce) r.blocked_time += trace.dt;
    if (i > 0) r.path_length += (row.x - rows[i - 1].x).norm();
    const Vec3 chi = (row.v_a - row.v).cwiseAbs();
    r.peak_chi = r.peak_chi.cwiseMax(chi);
    r.peak_chi_norm = std::max(r.peak_chi_norm, (row.v_a - row.v).norm());
    if (row.status == SolveStatus::Degenerate) ++r.degenerate_ticks;
    if (row.status == SolveStatus::IterationLimit) ++r.iteration_limit_ticks;
    if (row.fallback) ++r.fallback_ticks;
    if (options.goal && !r.goal_time &&
        (*options.goal - row.x).cwiseProduct(options.goal_mask).norm() <= options.goal_tolerance)
      r.goal_time = row.t;
  }
  if (moving > 0) r.mean_angle_dev_deg = angle_sum / static_cast<double>(moving);
  r.final_position = rows.back().x;

  for (Index axis = 0; axis < 3 && !r.recovery_time; ++axis) r.recovery_time = recovery_time(trace, axis);
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  auto v3 = [](const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); };
  return {{"ticks", r.ticks},
          {"duration", r.duration},
          {"max_angle_dev_deg", r.max_angle_dev_deg},
          {"mean_angle_dev_deg", r.mean_angle_dev_deg},
          {"blocked_time", r.blocked_time},
          {"path_length", r.path_length},
          {"goal_time", opt(r.goal_time)},
          {"recovery_time", opt(r.recovery_time)},
          {"peak_chi", v3(r.peak_chi)},
          {"peak_chi_norm", r.peak_chi_norm},
          {"degenerate_ticks", r.degenerate_ticks},
          {"iteration_limit_ticks", r.iteration_limit_ticks},
          {"fallback_ticks", r.fallback_ticks},
          {"final_position", v3(r.final_position)}};
}

}  // namespace dchier
