#include "dchier/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace dchier {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr std::array<const char*, 6> kAxisNames{"x", "y", "z", "rx", "ry", "rz"};

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": not finite");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Vec to_vec(const std::vector<double>& v, double scale = 1.0) {
  Vec out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i] * scale;
  return out;
}

Eigen::Vector3d vec3(const json& v, const std::string& where) {
  const auto xs = numbers(v, where);
  if (xs.size() != 3) throw ConfigError(where + ": expected 3 numbers");
  return {xs[0], xs[1], xs[2]};
}

std::vector<double> to_std(const Vec& v, double scale = 1.0) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i) * scale;
  return out;
}

json j3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

// A scalar broadcasts to every axis.
Vec per_axis(const json& v, Index axes, const std::string& where) {
  if (v.is_number()) return Vec::Constant(axes, v.get<double>());
  const Vec out = to_vec(numbers(v, where));
  if (out.size() != axes) throw ConfigError(where + ": expected " + std::to_string(axes) + " values");
  return out;
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

RobotModel parse_robot_model(const json& r) {
  RobotModel m;
  if (r.contains("preset")) {
    try {
      m = robot_preset(r.at("preset").get<std::string>());
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("robot.preset: ") + e.what());
    }
  }
  if (r.contains("joints")) {
    m.joints.clear();
    int i = 0;
    for (const json& j : r.at("joints")) {
      const std::string where = "robot.joints[" + std::to_string(i++) + "]";
      check_keys(j, where, {"axis", "offset"});
      Joint joint;
      joint.axis = vec3(j.at("axis"), where + ".axis").normalized();
      if (j.contains("offset")) joint.offset = vec3(j.at("offset"), where + ".offset");
      m.joints.push_back(joint);
    }
    const Index n = m.dofs();
    if (m.q_min.size() != n) m.q_min = Vec::Constant(n, -std::numbers::pi);
    if (m.q_max.size() != n) m.q_max = Vec::Constant(n, std::numbers::pi);
    if (m.q_home.size() != n) m.q_home = Vec::Zero(n);
  }
  if (m.joints.empty()) throw ConfigError("robot: give a preset or a joints list");
  if (r.contains("name")) m.name = r.at("name").get<std::string>();
  if (r.contains("base")) m.base = vec3(r.at("base"), "robot.base");
  if (r.contains("tool")) m.tool = vec3(r.at("tool"), "robot.tool");
  if (r.contains("q_min_deg")) m.q_min = to_vec(numbers(r.at("q_min_deg"), "robot.q_min_deg"), kDeg);
  if (r.contains("q_max_deg")) m.q_max = to_vec(numbers(r.at("q_max_deg"), "robot.q_max_deg"), kDeg);
  if (r.contains("q_home_deg")) m.q_home = to_vec(numbers(r.at("q_home_deg"), "robot.q_home_deg"), kDeg);
  try {
    m.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return m;
}

Eigen::Quaterniond rpy(const Eigen::Vector3d& deg) {
  const Eigen::Vector3d a = deg * kDeg;
  return Eigen::Quaterniond(Eigen::AngleAxisd(a.z(), Eigen::Vector3d::UnitZ()) *
                            Eigen::AngleAxisd(a.y(), Eigen::Vector3d::UnitY()) *
                            Eigen::AngleAxisd(a.x(), Eigen::Vector3d::UnitX()));
}

std::vector<Index> parse_axes(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty list of axes");
  std::vector<Index> out;
  for (const json& a : v) {
    if (!a.is_string()) throw ConfigError(where + ": axes are strings");
    try {
      out.push_back(parse_axis(a.get<std::string>()));
    } catch (const InvalidInput& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  std::set<Index> uniq(out.begin(), out.end());
  if (uniq.size() != out.size()) throw ConfigError(where + ": repeated axis");
  return out;
}

TaskSpec parse_task(const json& t, const std::string& where) {
  check_keys(t, where, {"kind", "axes", "gain"});
  TaskSpec spec;
  const std::string kind = text(t, "kind", "", where);
  if (kind == "hold") {
    spec.kind = TaskKind::Hold;
  } else if (kind == "interaction") {
    spec.kind = TaskKind::Interaction;
  } else {
    throw ConfigError(where + ".kind: expected 'hold' or 'interaction'");
  }
  if (!t.contains("axes")) throw ConfigError(where + ": missing axes");
  spec.axes = parse_axes(t.at("axes"), where + ".axes");
  spec.gain = number(t, "gain", spec.gain, where);
  if (spec.kind == TaskKind::Interaction &&
      std::any_of(spec.axes.begin(), spec.axes.end(), [](Index a) { return a > 2; }))
    throw ConfigError(where + ": interaction axes must be linear (x, y, z)");
  if (!(spec.gain > 0.0)) throw ConfigError(where + ".gain: must be positive");
  return spec;
}

BoundConfig parse_bound(const json& b, const std::string& where) {
  check_keys(b, where, {"kind", "label", "gain", "axis", "lower", "upper", "position", "band", "region"});
  BoundConfig c;
  const std::string kind = text(b, "kind", "", where);
  c.gain = number(b, "gain", c.gain, where);
  if (!(c.gain > 0.0)) throw ConfigError(where + ".gain: must be positive");
  auto axis = [&](const json& obj, const std::string& w) {
    try {
      return parse_axis(text(obj, "axis", "", w));
    } catch (const InvalidInput& e) {
      throw ConfigError(w + ".axis: " + e.what());
    }
  };
  if (kind == "joint_limits") {
    c.kind = BoundKind::JointLimits;
    c.label = text(b, "label", "joint", where);
  } else if (kind == "velocity") {
    c.kind = BoundKind::Velocity;
    c.axis = axis(b, where);
    c.lower = number(b, "lower", -1e18, where);
    c.upper = number(b, "upper", 1e18, where);
    if (c.lower > c.upper) throw ConfigError(where + ": lower exceeds upper");
    c.label = text(b, "label", "vel_" + axis_name(c.axis), where);
  } else if (kind == "wall") {
    c.kind = BoundKind::Wall;
    c.axis = axis(b, where);
    if (c.axis > 2) throw ConfigError(where + ".axis: walls are positional (x, y, z)");
    if (!b.contains("position")) throw ConfigError(where + ": missing position");
    c.position = number(b, "position", 0.0, where);
    c.band = number(b, "band", c.band, where);
    if (b.contains("region") && !b.at("region").is_null()) {
      const json& r = b.at("region");
      check_keys(r, where + ".region", {"axis", "min", "max"});
      RegionSpec reg;
      reg.axis = axis(r, where + ".region");
      reg.min = number(r, "min", reg.min, where + ".region");
      reg.max = number(r, "max", reg.max, where + ".region");
      c.region = reg;
    }
    c.label = text(b, "label", "wall_" + axis_name(c.axis), where);
  } else {
    throw ConfigError(where + ".kind: expected 'joint_limits', 'velocity' or 'wall'");
  }
  return c;
}

ForceSpec parse_operator(const json& o) {
  check_keys(o, "operator", {"kind", "script", "waypoints", "kp", "kd", "fmax", "switch_radius",
                             "noise_std", "seed"});
  ForceSpec f;
  const std::string kind = text(o, "kind", "external", "operator");
  if (kind == "scripted") {
    f.kind = ForceKind::Scripted;
    if (!o.contains("script")) throw ConfigError("operator: scripted force needs a script");
    double last_t = -1e18;
    for (const json& p : o.at("script")) {
      const auto xs = numbers(p, "operator.script");
      if (xs.size() != 4) throw ConfigError("operator.script: points are [t, fx, fy, fz]");
      if (xs[0] < last_t) throw ConfigError("operator.script: times must be nondecreasing");
      last_t = xs[0];
      f.script.push_back({xs[0], xs[1], xs[2], xs[3]});
    }
    if (f.script.empty()) throw ConfigError("operator.script: empty");
  } else if (kind == "virtual") {
    f.kind = ForceKind::VirtualOperator;
    if (!o.contains("waypoints")) throw ConfigError("operator: virtual operator needs waypoints");
    for (const json& w : o.at("waypoints")) f.waypoints.push_back(vec3(w, "operator.waypoints"));
    if (f.waypoints.empty()) throw ConfigError("operator.waypoints: empty");
  } else if (kind == "external") {
    f.kind = ForceKind::External;
  } else {
    throw ConfigError("operator.kind: expected 'scripted', 'virtual' or 'external'");
  }
  f.kp = number(o, "kp", f.kp, "operator");
  f.kd = number(o, "kd", f.kd, "operator");
  f.fmax = number(o, "fmax", f.fmax, "operator");
  f.switch_radius = number(o, "switch_radius", f.switch_radius, "operator");
  f.noise_std = number(o, "noise_std", f.noise_std, "operator");
  if (o.contains("seed")) {
    if (!o.at("seed").is_number_unsigned()) throw ConfigError("operator.seed: expected a nonnegative integer");
    f.seed = o.at("seed").get<std::uint64_t>();
  }
  if (f.kind == ForceKind::VirtualOperator && !(f.fmax > 0.0))
    throw ConfigError("operator.fmax: must be positive");
  if (f.noise_std < 0.0) throw ConfigError("operator.noise_std: must be nonnegative");
  return f;
}

AdmittanceParams parse_admittance(const json& a, double dt) {
  check_keys(a, "admittance", {"mode", "mass", "damping", "kappa1", "kappa2", "d_min"});
  AdmittanceParams p = AdmittanceParams::defaults(3);
  const std::string mode = text(a, "mode", "variable", "admittance");
  if (mode == "fixed") {
    p.mode = DampingMode::Fixed;
  } else if (mode == "variable") {
    p.mode = DampingMode::Variable;
  } else {
    throw ConfigError("admittance.mode: expected 'fixed' or 'variable'");
  }
  if (a.contains("mass")) p.mass = per_axis(a.at("mass"), 3, "admittance.mass");
  if (a.contains("damping")) p.fixed_damping = per_axis(a.at("damping"), 3, "admittance.damping");
  p.kappa1 = number(a, "kappa1", p.kappa1, "admittance");
  p.kappa2 = number(a, "kappa2", p.kappa2, "admittance");
  p.d_min = number(a, "d_min", p.d_min, "admittance");
  p.dt = dt;
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return p;
}

}  // namespace

Index parse_axis(const std::string& name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i)
    if (name == kAxisNames[i]) return static_cast<Index>(i);
  throw ConfigError("unknown axis '" + name + "' (x, y, z, rx, ry, rz)");
}

std::string axis_name(Index axis) {
  if (axis < 0 || axis >= 6) throw InvalidInput("axis index out of range");
  return kAxisNames[static_cast<std::size_t>(axis)];
}

double ThetaSchedule::theta_deg(double d) const {
  const double ramp = (d - d_e) / (d_s - d_e) * max_deg;
  return std::clamp(ramp, floor_deg, 180.0);
}

std::size_t Scenario::interaction_level() const {
  std::optional<std::size_t> found;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    for (const TaskSpec& t : levels[k].tasks) {
      if (t.kind != TaskKind::Interaction) continue;
      if (found && *found != k) throw ConfigError("scenario: interaction task on more than one level");
      found = k;
    }
  }
  if (!found) throw ConfigError("scenario: no interaction task");
  return *found;
}

std::vector<Index> Scenario::interaction_axes() const {
  std::vector<Index> axes;
  for (const TaskSpec& t : levels[interaction_level()].tasks)
    if (t.kind == TaskKind::Interaction) axes.insert(axes.end(), t.axes.begin(), t.axes.end());
  return axes;
}

std::optional<Eigen::Vector3d> Scenario::goal() const {
  if (op.kind == ForceKind::VirtualOperator && !op.waypoints.empty()) return op.waypoints.back();
  return std::nullopt;
}

std::size_t Scenario::ticks() const {
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

void Scenario::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (levels.empty()) throw ConfigError("levels: at least one level required");
  for (const LevelSpec& l : levels) {
    if (l.tasks.empty()) throw ConfigError("level '" + l.name + "': no tasks");
    if (!(l.theta_deg >= 0.0 && l.theta_deg <= 180.0))
      throw ConfigError("level '" + l.name + "': theta_deg must lie in [0, 180]");
  }
  const auto axes = interaction_axes();
  std::set<Index> uniq(axes.begin(), axes.end());
  if (uniq.size() != axes.size()) throw ConfigError("scenario: repeated interaction axis");
  if (q0.size() != robot.dofs()) throw ConfigError("robot: q0 has wrong dimension");
  if (theta_schedule && !(theta_schedule->d_s > theta_schedule->d_e))
    throw ConfigError("theta_schedule: d_s must exceed d_e");
  try {
    robot.validate();
    admittance.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

namespace {

Scenario parse_document(const json& doc) {
  check_keys(doc, "scenario", {"name", "robot", "levels", "operator", "admittance", "dt", "duration",
                               "theta_schedule", "goal_tolerance"});
  Scenario s;
  s.name = text(doc, "name", s.name, "scenario");
  s.dt = number(doc, "dt", s.dt, "scenario");
  s.duration = number(doc, "duration", s.duration, "scenario");
  s.goal_tolerance = number(doc, "goal_tolerance", s.goal_tolerance, "scenario");
  if (!(s.dt > 0.0)) throw ConfigError("dt must be positive");

  if (!doc.contains("robot")) throw ConfigError("scenario: missing robot");
  const json& r = doc.at("robot");
  check_keys(r, "robot", {"preset", "name", "joints", "base", "tool", "q_min_deg", "q_max_deg",
                          "q_home_deg", "q0_deg", "start_position", "start_rpy_deg"});
  s.robot = parse_robot_model(r);
  if (r.contains("q0_deg")) {
    s.q0 = to_vec(numbers(r.at("q0_deg"), "robot.q0_deg"), kDeg);
  } else if (r.contains("start_position")) {
    Pose target;
    target.position = vec3(r.at("start_position"), "robot.start_position");
    target.orientation =
        rpy(r.contains("start_rpy_deg") ? vec3(r.at("start_rpy_deg"), "robot.start_rpy_deg")
                                        : Eigen::Vector3d(180.0, 0.0, 0.0));
    const IkResult ik = solve_ik(s.robot, s.robot.q_home, target);
    if (!ik.converged) throw ConfigError("robot.start_position: unreachable with this orientation");
    s.q0 = ik.q;
  } else {
    s.q0 = s.robot.q_home;
  }

  if (!doc.contains("levels") || !doc.at("levels").is_array())
    throw ConfigError("scenario: levels must be an array");
  int li = 0;
  for (const json& l : doc.at("levels")) {
    const std::string where = "levels[" + std::to_string(li++) + "]";
    check_keys(l, where, {"name", "tasks", "bounds", "theta_deg"});
    LevelSpec spec;
    spec.name = text(l, "name", "level" + std::to_string(li), where);
    spec.theta_deg = number(l, "theta_deg", spec.theta_deg, where);
    if (l.contains("tasks")) {
      int ti = 0;
      for (const json& t : l.at("tasks"))
        spec.tasks.push_back(parse_task(t, where + ".tasks[" + std::to_string(ti++) + "]"));
    }
    if (l.contains("bounds")) {
      int bi = 0;
      for (const json& b : l.at("bounds"))
        spec.bounds.push_back(parse_bound(b, where + ".bounds[" + std::to_string(bi++) + "]"));
    }
    s.levels.push_back(std::move(spec));
  }

  s.op = parse_operator(doc.value("operator", json::object()));
  s.admittance = parse_admittance(doc.value("admittance", json::object()), s.dt);

  if (doc.contains("theta_schedule") && !doc.at("theta_schedule").is_null()) {
    const json& t = doc.at("theta_schedule");
    check_keys(t, "theta_schedule", {"d_s", "d_e", "max_deg", "floor_deg", "target"});
    ThetaSchedule ts;
    ts.d_s = number(t, "d_s", ts.d_s, "theta_schedule");
    ts.d_e = number(t, "d_e", ts.d_e, "theta_schedule");
    ts.max_deg = number(t, "max_deg", ts.max_deg, "theta_schedule");
    ts.floor_deg = number(t, "floor_deg", ts.floor_deg, "theta_schedule");
    if (t.contains("target")) ts.target = vec3(t.at("target"), "theta_schedule.target");
    s.theta_schedule = ts;
  }
  s.validate();
  return s;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  try {
    return parse_document(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

json to_json(const Scenario& s) {
  json robot;
  robot["name"] = s.robot.name;
  robot["base"] = j3(s.robot.base);
  robot["tool"] = j3(s.robot.tool);
  json joints = json::array();
  for (const Joint& j : s.robot.joints) joints.push_back({{"axis", j3(j.axis)}, {"offset", j3(j.offset)}});
  robot["joints"] = joints;
  robot["q_min_deg"] = to_std(s.robot.q_min, 1.0 / kDeg);
  robot["q_max_deg"] = to_std(s.robot.q_max, 1.0 / kDeg);
  robot["q_home_deg"] = to_std(s.robot.q_home, 1.0 / kDeg);
  robot["q0_deg"] = to_std(s.q0, 1.0 / kDeg);

  json levels = json::array();
  for (const LevelSpec& l : s.levels) {
    json tasks = json::array();
    for (const TaskSpec& t : l.tasks) {
      json axes = json::array();
      for (Index a : t.axes) axes.push_back(axis_name(a));
      json jt{{"kind", t.kind == TaskKind::Hold ? "hold" : "interaction"}, {"axes", axes}};
      if (t.kind == TaskKind::Hold) jt["gain"] = t.gain;
      tasks.push_back(jt);
    }
    json bounds = json::array();
    for (const BoundConfig& b : l.bounds) {
      json jb{{"label", b.label}, {"gain", b.gain}};
      switch (b.kind) {
        case BoundKind::JointLimits:
          jb["kind"] = "joint_limits";
          break;
        case BoundKind::Velocity:
          jb["kind"] = "velocity";
          jb["axis"] = axis_name(b.axis);
          jb["lower"] = b.lower;
          jb["upper"] = b.upper;
          break;
        case BoundKind::Wall:
          jb["kind"] = "wall";
          jb["axis"] = axis_name(b.axis);
          jb["position"] = b.position;
          jb["band"] = b.band;
          if (b.region)
            jb["region"] = {{"axis", axis_name(b.region->axis)}, {"min", b.region->min}, {"max", b.region->max}};
          break;
      }
      bounds.push_back(jb);
    }
    levels.push_back({{"name", l.name}, {"tasks", tasks}, {"bounds", bounds}, {"theta_deg", l.theta_deg}});
  }

  json op;
  switch (s.op.kind) {
    case ForceKind::Scripted: {
      op["kind"] = "scripted";
      json pts = json::array();
      for (const auto& p : s.op.script) pts.push_back({p[0], p[1], p[2], p[3]});
      op["script"] = pts;
      break;
    }
    case ForceKind::VirtualOperator: {
      op["kind"] = "virtual";
      json wps = json::array();
      for (const auto& w : s.op.waypoints) wps.push_back(j3(w));
      op["waypoints"] = wps;
      break;
    }
    case ForceKind::External:
      op["kind"] = "external";
      break;
  }
  op["kp"] = s.op.kp;
  op["kd"] = s.op.kd;
  op["fmax"] = s.op.fmax;
  op["switch_radius"] = s.op.switch_radius;
  op["noise_std"] = s.op.noise_std;
  op["seed"] = s.op.seed;

  const AdmittanceParams& a = s.admittance;
  json adm{{"mode", a.mode == DampingMode::Fixed ? "fixed" : "variable"},
           {"mass", to_std(a.mass)},
           {"damping", to_std(a.fixed_damping)},
           {"kappa1", a.kappa1},
           {"kappa2", a.kappa2},
           {"d_min", a.d_min}};

  json out{{"name", s.name},         {"robot", robot}, {"levels", levels},
           {"operator", op},         {"admittance", adm}, {"dt", s.dt},
           {"duration", s.duration}, {"goal_tolerance", s.goal_tolerance}};
  if (s.theta_schedule) {
    json ts{{"d_s", s.theta_schedule->d_s},
            {"d_e", s.theta_schedule->d_e},
            {"max_deg", s.theta_schedule->max_deg},
            {"floor_deg", s.theta_schedule->floor_deg}};
    if (s.theta_schedule->target) ts["target"] = j3(*s.theta_schedule->target);
    out["theta_schedule"] = ts;
  } else {
    out["theta_schedule"] = nullptr;
  }
  return out;
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw ConfigError("override: empty key");
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;

  json* node = &doc;
  std::stringstream ss(dotted_key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + dotted_key + "': empty path segment");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(p, &used);
        if (used != p.size()) throw std::invalid_argument(p);
      } catch (const std::exception&) {
        throw ConfigError("override '" + dotted_key + "': '" + p + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("override '" + dotted_key + "': index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object())
        throw ConfigError("override '" + dotted_key + "': '" + p + "' descends into a scalar");
      node = &(*node)[p];
    }
    if (last) *node = parsed;
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected key=value");
  apply_override(doc, assignment.substr(0, eq), assignment.substr(eq + 1));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  json doc = read_json_file(path);
  for (const std::string& o : overrides) apply_override(doc, o);
  try {
    return parse_scenario(doc);
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace dchier
