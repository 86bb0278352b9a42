#include "dchier/robot.hpp"

#include <cmath>
#include <numbers>

namespace dchier {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Frames {
  std::vector<Eigen::Vector3d> origin;  // world position of each joint
  std::vector<Eigen::Vector3d> axis;    // world joint axis
  Pose tip;
};

Frames chain_frames(const RobotModel& model, const Vec& q) {
  if (q.size() != model.dofs()) throw InvalidInput("robot: q has wrong dimension");
  require_finite(q, "robot q");
  Frames f;
  Eigen::Vector3d p = model.base;
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  for (Index i = 0; i < model.dofs(); ++i) {
    const Joint& j = model.joints[static_cast<std::size_t>(i)];
    p += r * j.offset;
    const Eigen::Vector3d axis = r * j.axis;
    f.origin.push_back(p);
    f.axis.push_back(axis);
    r = r * Eigen::AngleAxisd(q(i), j.axis).toRotationMatrix();
  }
  f.tip.position = p + r * model.tool;
  f.tip.orientation = Eigen::Quaterniond(r).normalized();
  return f;
}

}  // namespace

void RobotModel::validate() const {
  if (joints.size() < 2) throw InvalidInput("robot: at least two joints required");
  for (const Joint& j : joints) {
    if (!j.offset.allFinite() || !j.axis.allFinite()) throw InvalidInput("robot: non-finite joint");
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) throw InvalidInput("robot: joint axis must be unit length");
  }
  const Index n = dofs();
  if (q_min.size() != n || q_max.size() != n || q_home.size() != n)
    throw InvalidInput("robot: limit vectors must match the joint count");
  if ((q_min.array() >= q_max.array()).any()) throw InvalidInput("robot: q_min must be below q_max");
  if ((q_home.array() < q_min.array()).any() || (q_home.array() > q_max.array()).any())
    throw InvalidInput("robot: q_home outside the joint limits");
}

RobotModel planar_chain(const std::vector<double>& lengths) {
  RobotModel m;
  m.name = "planar" + std::to_string(lengths.size());
  double prev = 0.0;
  for (double len : lengths) {
    Joint j;
    j.offset = Eigen::Vector3d(prev, 0.0, 0.0);
    j.axis = Eigen::Vector3d::UnitZ();
    m.joints.push_back(j);
    prev = len;
  }
  m.tool = Eigen::Vector3d(prev, 0.0, 0.0);
  const Index n = m.dofs();
  m.q_min = Vec::Constant(n, -std::numbers::pi);
  m.q_max = Vec::Constant(n, std::numbers::pi);
  m.q_home = Vec::Zero(n);
  return m;
}

RobotModel arm7() {
  RobotModel m;
  m.name = "arm7";
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  m.joints = {
      {Eigen::Vector3d(0.0, 0.0, 0.267), z},   {Eigen::Vector3d(0.0, 0.0, 0.0), y},
      {Eigen::Vector3d(0.0, 0.0, 0.293), z},   {Eigen::Vector3d(0.0525, 0.0, 0.0), y},
      {Eigen::Vector3d(0.0775, 0.0, 0.3425), z}, {Eigen::Vector3d(0.0, 0.0, 0.0), y},
      {Eigen::Vector3d(0.076, 0.0, 0.097), z},
  };
  m.tool = Eigen::Vector3d(0.0, 0.0, 0.0);
  Vec lo(7), hi(7), home(7);
  lo << -360, -118, -360, -11, -360, -97, -360;
  hi << 360, 120, 360, 225, 360, 180, 360;
  home << 0, 15, 0, 70, 0, 55, 0;
  m.q_min = lo * kDeg;
  m.q_max = hi * kDeg;
  m.q_home = home * kDeg;
  return m;
}

RobotModel robot_preset(const std::string& name) {
  if (name == "planar2") return planar_chain({1.0, 1.0});
  if (name == "planar3") return planar_chain({1.0, 1.0, 1.0});
  if (name == "arm7") return arm7();
  throw InvalidInput("unknown robot preset '" + name + "' (planar2, planar3, arm7)");
}

Pose forward_kinematics(const RobotModel& model, const Vec& q) { return chain_frames(model, q).tip; }

Mat jacobian(const RobotModel& model, const Vec& q) {
  const Frames f = chain_frames(model, q);
  const Index n = model.dofs();
  Mat j(6, n);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    j.block<3, 1>(0, i) = f.axis[k].cross(f.tip.position - f.origin[k]);
    j.block<3, 1>(3, i) = f.axis[k];
  }
  return j;
}

Eigen::Vector3d orientation_error(const Eigen::Quaterniond& to, const Eigen::Quaterniond& from) {
  Eigen::Quaterniond delta = to * from.conjugate();
  if (delta.w() < 0.0) delta.coeffs() = -delta.coeffs();
  const Eigen::AngleAxisd aa(delta.normalized());
  return aa.angle() * aa.axis();
}

IkResult solve_ik(const RobotModel& model, const Vec& q_seed, const Pose& target, int max_iterations) {
  IkResult out;
  out.q = q_seed;
  const double lambda2 = 1e-4;
  for (int it = 0; it < max_iterations; ++it) {
    const Pose pose = forward_kinematics(model, out.q);
    Eigen::Matrix<double, 6, 1> err;
    err.head<3>() = target.position - pose.position;
    err.tail<3>() = orientation_error(target.orientation, pose.orientation);
    out.position_error = err.head<3>().norm();
    out.orientation_error = err.tail<3>().norm();
    if (out.position_error < 1e-10 && out.orientation_error < 1e-10) {
      out.converged = true;
      break;
    }
    const Mat j = jacobian(model, out.q);
    const Mat jjt = j * j.transpose() + lambda2 * Mat::Identity(6, 6);
    Vec dq = j.transpose() * jjt.ldlt().solve(Vec(err));
    const double step = dq.norm();
    if (step > 0.2) dq *= 0.2 / step;
    out.q = (out.q + dq).cwiseMax(model.q_min).cwiseMin(model.q_max);
  }
  return out;
}

}  // namespace dchier
