#include "dchier/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dchier {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Bounds at or beyond this magnitude are treated as absent.
constexpr double kOpenBound = 1e17;

Vec3 axis_mask(const std::vector<Index>& axes) {
  Vec3 m = Vec3::Zero();
  for (Index a : axes)
    if (a < 3) m(a) = 1.0;
  return m;
}

struct RowSink {
  Mat C;
  Vec d;
  std::vector<std::string> labels;

  void add(const Mat& c, const Vec& dv, const std::vector<std::string>& names) {
    append_rows(C, d, c, dv);
    labels.insert(labels.end(), names.begin(), names.end());
  }
};

void add_bound(const BoundConfig& b, const Scenario& sc, const SimState& st, const Mat& jac,
               RowSink& sink) {
  const Index n = sc.robot.dofs();
  switch (b.kind) {
    case BoundKind::JointLimits: {
      BoundSpec spec{sc.robot.q_min, sc.robot.q_max, Vec::Zero(n), Vec::Zero(n),
                     b.gain * Mat::Identity(n, n)};
      const VelocityBounds vb = shape_bounds(spec, st.q);
      const InequalityRows rows = to_two_sided_rows(Mat::Identity(n, n), vb.lower, vb.upper);
      std::vector<std::string> names;
      for (Index i = 0; i < n; ++i) names.push_back(b.label + "_lower[" + std::to_string(i) + "]");
      for (Index i = 0; i < n; ++i) names.push_back(b.label + "_upper[" + std::to_string(i) + "]");
      sink.add(rows.C, rows.d, names);
      break;
    }
    case BoundKind::Velocity: {
      const Mat row = jac.row(b.axis);
      if (b.lower > -kOpenBound) sink.add(-row, Vec::Constant(1, -b.lower), {b.label + "_lower"});
      if (b.upper < kOpenBound) sink.add(row, Vec::Constant(1, b.upper), {b.label + "_upper"});
      break;
    }
    case BoundKind::Wall: {
      const double c = st.pose.position(b.axis);
      if (std::abs(c - b.position) > b.band) break;
      if (b.region) {
        const double r = st.pose.position(b.region->axis);
        if (r < b.region->min || r > b.region->max) break;
      }
      BoundSpec spec{Vec::Constant(1, b.position), Vec::Constant(1, b.position), Vec::Zero(1),
                     Vec::Zero(1), Mat::Constant(1, 1, b.gain)};
      const VelocityBounds vb = shape_bounds(spec, Vec::Constant(1, c));
      const InequalityRows rows = to_two_sided_rows(jac.row(b.axis), vb.lower, vb.upper);
      // Only the side the end effector is on acts as a wall.
      if (c <= b.position) {
        sink.add(rows.C.bottomRows(1), rows.d.tail(1), {b.label});
      } else {
        sink.add(rows.C.topRows(1), rows.d.head(1), {b.label});
      }
      break;
    }
  }
}

}  // namespace

SimState initial_state(const Scenario& scenario) {
  SimState s;
  s.q = scenario.q0;
  s.pose = forward_kinematics(scenario.robot, s.q);
  s.anchor = s.pose;
  s.last_u = Vec::Zero(scenario.robot.dofs());
  return s;
}

BuiltHierarchy build_hierarchy(const Scenario& scenario, const SimState& state, const Vec3& v_a) {
  const Index n = scenario.robot.dofs();
  if (state.q.size() != n) throw InvalidInput("build_hierarchy: state does not match the robot");
  require_finite(v_a, "build_hierarchy v_a");
  const Mat jac = jacobian(scenario.robot, state.q);
  const Eigen::Vector3d rot_err = orientation_error(state.anchor.orientation, state.pose.orientation);

  BuiltHierarchy out{Hierarchy({TaskLevel::equality(Mat::Zero(0, n), Vec::Zero(0))}, n), {}, 0, 180.0};
  out.interaction_level = scenario.interaction_level();
  std::vector<TaskLevel> levels;
  for (std::size_t k = 0; k < scenario.levels.size(); ++k) {
    const LevelSpec& spec = scenario.levels[k];
    TaskLevel level;
    Index rows = 0;
    for (const TaskSpec& t : spec.tasks) rows += static_cast<Index>(t.axes.size());
    level.A.resize(rows, n);
    level.b.resize(rows);
    Index at = 0;
    for (const TaskSpec& t : spec.tasks) {
      for (Index a : t.axes) {
        level.A.row(at) = jac.row(a);
        if (t.kind == TaskKind::Interaction) {
          level.b(at) = v_a(a);
        } else {
          const double error = a < 3 ? state.anchor.position(a) - state.pose.position(a) : rot_err(a - 3);
          level.b(at) = reference_velocity(Vec::Zero(1), Vec::Constant(1, error), Vec::Zero(1),
                                           Mat::Constant(1, 1, t.gain))(0);
        }
        ++at;
      }
    }

    RowSink sink;
    sink.C.resize(0, n);
    sink.d.resize(0);
    for (const BoundConfig& b : spec.bounds) add_bound(b, scenario, state, jac, sink);
    level.C = std::move(sink.C);
    level.d = std::move(sink.d);
    out.row_labels.insert(out.row_labels.end(), sink.labels.begin(), sink.labels.end());

    double theta_deg = spec.theta_deg;
    if (k == out.interaction_level && scenario.theta_schedule) {
      const auto target = scenario.theta_schedule->target ? scenario.theta_schedule->target : scenario.goal();
      if (target) {
        const Vec3 mask = axis_mask(scenario.interaction_axes());
        const double dist = (*target - state.pose.position).cwiseProduct(mask).norm();
        theta_deg = std::min(theta_deg, scenario.theta_schedule->theta_deg(dist));
      }
    }
    if (k == out.interaction_level) out.theta_deg = theta_deg;
    level.theta = theta_deg * kDeg;
    levels.push_back(std::move(level));
  }
  out.hierarchy = Hierarchy(std::move(levels), n);
  return out;
}

Vec3 scripted_force(const ForceSpec& spec, double t) {
  const auto& s = spec.script;
  if (s.empty()) return Vec3::Zero();
  auto at = [](const std::array<double, 4>& p) { return Vec3(p[1], p[2], p[3]); };
  if (t <= s.front()[0]) return at(s.front());
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (t <= s[i][0]) {
      const double span = s[i][0] - s[i - 1][0];
      const double w = span > 0.0 ? (t - s[i - 1][0]) / span : 1.0;
      return (1.0 - w) * at(s[i - 1]) + w * at(s[i]);
    }
  }
  return at(s.back());
}

ForceSource::ForceSource(const ForceSpec& spec) : spec_(spec), rng_(spec.seed) {}

Vec3 ForceSource::sample(double t, const Vec3& position, const Vec3& velocity, const Vec3& external) {
  switch (spec_.kind) {
    case ForceKind::External:
      return external;
    case ForceKind::Scripted:
      return scripted_force(spec_, t);
    case ForceKind::VirtualOperator:
      break;
  }
  while (waypoint_ + 1 < spec_.waypoints.size() &&
         (spec_.waypoints[waypoint_] - position).norm() < spec_.switch_radius)
    ++waypoint_;
  Vec3 f = spec_.kp * (spec_.waypoints[waypoint_] - position) - spec_.kd * velocity;
  if (spec_.noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, spec_.noise_std);
    for (Index i = 0; i < 3; ++i) f(i) += noise(rng_);
  }
  const double mag = f.norm();
  if (mag > spec_.fmax) f *= spec_.fmax / mag;
  return f;
}

Simulation::Simulation(Scenario scenario, Backend backend)
    : scenario_(std::move(scenario)), backend_(backend), force_(scenario_.op) {
  scenario_.validate();
  state_ = initial_state(scenario_);
  adm_ = AdmittanceState::at_rest(scenario_.admittance);
  axes_ = scenario_.interaction_axes();
}

void Simulation::set_theta_deg(std::size_t level, double theta_deg) {
  if (level >= scenario_.levels.size()) throw InvalidInput("set_theta_deg: no such level");
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) throw InvalidInput("set_theta_deg: outside [0, 180]");
  scenario_.levels[level].theta_deg = theta_deg;
}

void Simulation::set_admittance(const AdmittanceParams& params) {
  params.validate();
  if (params.axes() != scenario_.admittance.axes()) throw InvalidInput("set_admittance: axis count changed");
  scenario_.admittance = params;
  if (params.mode == DampingMode::Fixed) adm_.damping = params.fixed_damping;
}

const TraceRow& Simulation::step(const Vec3& external) {
  const double t = static_cast<double>(tick_) * scenario_.dt;
  state_.t = t;
  const Vec3 mask = axis_mask(axes_);
  // Commanded end-effector velocity of the previous tick.
  const Vec3 v_prev = state_.v_ee.head<3>();
  Vec3 f = force_.sample(t, state_.pose.position, v_prev, external).cwiseProduct(mask);
  require_finite(f, "force");

  adm_ = dchier::step(adm_, f, v_prev.cwiseProduct(mask), scenario_.admittance);
  const BuiltHierarchy built = build_hierarchy(scenario_, state_, adm_.v_a);
  const SolveOutcome out = solve(built.hierarchy, backend_);
  const LevelDiag& diag = out.per_level[built.interaction_level];

  Vec u = out.u;
  if (out.status != SolveStatus::Optimal) u.setZero();
  const Mat jac = jacobian(scenario_.robot, state_.q);
  state_.v_ee = jac * u;

  TraceRow row;
  row.t = t;
  row.q = state_.q;
  row.x = state_.pose.position;
  row.v = state_.v_ee.head<3>();
  row.v_a = adm_.v_a;
  row.f = f;
  const TaskLevel& level = built.hierarchy.levels()[built.interaction_level];
  row.angle_dev_deg = angle(level.A * u, level.b) / kDeg;
  row.eta = diag.eta;
  row.s = diag.s_star;
  row.blocked = row.v.norm() < kBlockedSpeed && f.norm() > kBlockedForce;
  for (Index i : diag.saturated) row.sat_rows.push_back(built.row_labels[static_cast<std::size_t>(i)]);
  row.status = out.status;
  row.fallback = std::any_of(out.per_level.begin(), out.per_level.end(),
                             [](const LevelDiag& d) { return d.fallback; });
  row.theta_deg = built.theta_deg;

  state_.last_u = u;
  state_.q += u * scenario_.dt;
  state_.pose = forward_kinematics(scenario_.robot, state_.q);
  ++tick_;
  last_ = std::move(row);
  return last_;
}

TraceLog run(const Scenario& scenario, Backend backend) {
  Simulation sim(scenario, backend);
  TraceLog log;
  log.scenario = scenario.name;
  log.backend = backend;
  log.dofs = scenario.robot.dofs();
  log.dt = scenario.dt;
  const std::size_t n = scenario.ticks();
  log.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) log.rows.push_back(sim.step());
  return log;
}

}  // namespace dchier
