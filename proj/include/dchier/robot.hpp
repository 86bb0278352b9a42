#pragma once

#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "dchier/numerics.hpp"

namespace dchier {

struct Joint {
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // from the previous frame, in that frame
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();   // local rotation axis, unit length
};

struct RobotModel {
  std::string name;
  std::vector<Joint> joints;
  Eigen::Vector3d base = Eigen::Vector3d::Zero();
  Eigen::Vector3d tool = Eigen::Vector3d::Zero();  // tip offset in the last joint frame
  Vec q_min;
  Vec q_max;
  Vec q_home;

  Index dofs() const { return static_cast<Index>(joints.size()); }
  void validate() const;
};

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

/// Planar chain in the x-y plane with z joint axes.
RobotModel planar_chain(const std::vector<double>& lengths);
/// Seven revolute joints with approximate xArm7 link offsets.
RobotModel arm7();
/// "planar2", "planar3" or "arm7"; throws InvalidInput otherwise.
RobotModel robot_preset(const std::string& name);

Pose forward_kinematics(const RobotModel& model, const Vec& q);

/// Geometric Jacobian, linear rows first: [v; w] = J q_dot.
Mat jacobian(const RobotModel& model, const Vec& q);

/// Rotation vector taking `from` onto `to`, expressed in the world frame.
Eigen::Vector3d orientation_error(const Eigen::Quaterniond& to, const Eigen::Quaterniond& from);

struct IkResult {
  Vec q;
  double position_error = 0;
  double orientation_error = 0;
  bool converged = false;
};

/// Damped least-squares position and orientation IK, clamped to joint limits.
IkResult solve_ik(const RobotModel& model, const Vec& q_seed, const Pose& target,
                  int max_iterations = 500);

}  // namespace dchier
