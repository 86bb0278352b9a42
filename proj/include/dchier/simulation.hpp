#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dchier/admittance.hpp"
#include "dchier/hierarchy.hpp"
#include "dchier/robot.hpp"
#include "dchier/scenario.hpp"
#include "dchier/solvers.hpp"

namespace dchier {

using Vec3 = Eigen::Vector3d;

struct SimState {
  double t = 0.0;
  Vec q;
  Pose pose;
  Eigen::Matrix<double, 6, 1> v_ee = Eigen::Matrix<double, 6, 1>::Zero();
  Vec last_u;
  Pose anchor;  // hold-task reference, the pose at t = 0
};

SimState initial_state(const Scenario& scenario);

struct BuiltHierarchy {
  Hierarchy hierarchy;
  std::vector<std::string> row_labels;  // one per stacked inequality row
  std::size_t interaction_level = 0;
  double theta_deg = 180.0;  // interaction level, after the schedule
};

/// v_a holds x, y, z; only the interaction axes are read.
BuiltHierarchy build_hierarchy(const Scenario& scenario, const SimState& state, const Vec3& v_a);

/// Scripted profile value at time t (linear in between, held past the ends).
Vec3 scripted_force(const ForceSpec& spec, double t);

class ForceSource {
 public:
  explicit ForceSource(const ForceSpec& spec);

  /// Raw operator force; an external source returns `external`.
  Vec3 sample(double t, const Vec3& position, const Vec3& velocity, const Vec3& external);
  std::size_t waypoint() const { return waypoint_; }

 private:
  ForceSpec spec_;
  std::size_t waypoint_ = 0;
  std::mt19937_64 rng_;
};

struct TraceRow {
  double t = 0;
  Vec q;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 v_a = Vec3::Zero();
  Vec3 f = Vec3::Zero();
  double angle_dev_deg = 0;
  double eta = 1;
  double s = 1;
  bool blocked = false;
  std::vector<std::string> sat_rows;
  SolveStatus status = SolveStatus::Optimal;
  bool fallback = false;
  double theta_deg = 180;
};

struct TraceLog {
  std::string scenario;
  Backend backend = Backend::DirectionConstrained;
  Index dofs = 0;
  double dt = 0;
  std::vector<TraceRow> rows;
};

/// Speed and force thresholds of the blocked-motion test.
inline constexpr double kBlockedSpeed = 1e-3;
inline constexpr double kBlockedForce = 2.0;

/// Steppable closed loop: force, admittance, hierarchy, solve, integrate.
class Simulation {
 public:
  Simulation(Scenario scenario, Backend backend);

  /// Advances one tick; `external` feeds an External force source.
  const TraceRow& step(const Vec3& external = Vec3::Zero());

  const Scenario& scenario() const { return scenario_; }
  const SimState& state() const { return state_; }
  const AdmittanceState& admittance() const { return adm_; }
  Backend backend() const { return backend_; }
  std::size_t tick() const { return tick_; }
  const TraceRow& last() const { return last_; }

  void set_backend(Backend backend) { backend_ = backend; }
  void set_theta_deg(std::size_t level, double theta_deg);
  void set_admittance(const AdmittanceParams& params);

 private:
  Scenario scenario_;
  Backend backend_;
  SimState state_;
  AdmittanceState adm_;
  ForceSource force_;
  std::vector<Index> axes_;
  std::size_t tick_ = 0;
  TraceRow last_;
};

TraceLog run(const Scenario& scenario, Backend backend);

}  // namespace dchier
