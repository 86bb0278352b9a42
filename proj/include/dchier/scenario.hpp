#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dchier/admittance.hpp"
#include "dchier/robot.hpp"

namespace dchier {

/// Raised for malformed or inconsistent scenario documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// End-effector coordinates: 0..2 linear x, y, z; 3..5 angular rx, ry, rz.
Index parse_axis(const std::string& name);
std::string axis_name(Index axis);

enum class TaskKind { Hold, Interaction };

struct TaskSpec {
  TaskKind kind = TaskKind::Hold;
  std::vector<Index> axes;
  double gain = 5.0;  // Hold only
};

enum class BoundKind { JointLimits, Velocity, Wall };

struct RegionSpec {
  Index axis = 1;
  double min = -1e18;
  double max = 1e18;
};

struct BoundConfig {
  BoundKind kind = BoundKind::JointLimits;
  std::string label;
  double gain = 5.0;
  Index axis = 0;
  double lower = 0.0;      // Velocity
  double upper = 0.0;      // Velocity
  double position = 0.0;   // Wall
  double band = 1e18;      // Wall: rows exist while |x_axis - position| <= band
  std::optional<RegionSpec> region;  // Wall: rows exist while the region test holds
};

struct LevelSpec {
  std::string name;
  std::vector<TaskSpec> tasks;
  std::vector<BoundConfig> bounds;
  double theta_deg = 180.0;
};

struct ThetaSchedule {
  double d_s = 0.2;
  double d_e = 0.05;
  double max_deg = 45.0;
  double floor_deg = 10.0;
  std::optional<Eigen::Vector3d> target;

  /// Direction limit in degrees at distance d from the target.
  double theta_deg(double d) const;
};

enum class ForceKind { Scripted, VirtualOperator, External };

struct ForceSpec {
  ForceKind kind = ForceKind::External;
  std::vector<std::array<double, 4>> script;  // (t, fx, fy, fz), linear in between
  std::vector<Eigen::Vector3d> waypoints;
  double kp = 40.0;
  double kd = 5.0;
  double fmax = 20.0;
  double switch_radius = 0.01;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name = "scenario";
  RobotModel robot;
  Vec q0;
  std::vector<LevelSpec> levels;
  ForceSpec op;
  AdmittanceParams admittance;
  double dt = 0.005;
  double duration = 10.0;
  std::optional<ThetaSchedule> theta_schedule;
  double goal_tolerance = 0.01;

  /// Index of the single level carrying the interaction task.
  std::size_t interaction_level() const;
  std::vector<Index> interaction_axes() const;
  std::optional<Eigen::Vector3d> goal() const;
  std::size_t ticks() const;
  void validate() const;
};

Scenario parse_scenario(const nlohmann::json& doc);
/// Effective configuration with every default spelled out.
nlohmann::json to_json(const Scenario& scenario);

/// Sets a dotted path (array elements by index) to value; value is read as
/// JSON when it parses, as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);
/// Splits "key=value" and applies it.
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json read_json_file(const std::string& path);
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace dchier
