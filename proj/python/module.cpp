#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dchier/admittance.hpp"
#include "dchier/hierarchy.hpp"
#include "dchier/metrics.hpp"
#include "dchier/robot.hpp"
#include "dchier/scenario.hpp"
#include "dchier/simulation.hpp"
#include "dchier/solvers.hpp"

namespace py = pybind11;
using namespace dchier;

namespace {

Mat as_matrix(const py::handle& obj, Index cols) {
  if (obj.is_none()) return Mat(0, cols);
  Mat m = obj.cast<Mat>();
  if (m.size() == 0) return Mat(0, cols);
  return m;
}

Vec as_vector(const py::handle& obj) {
  if (obj.is_none()) return Vec(0);
  return obj.cast<Vec>();
}

// A level is either a dict with keys A, b, C, d, theta or a tuple (A, b[, C, d[, theta]]).
TaskLevel to_level(const py::handle& obj) {
  TaskLevel level;
  py::object a, b, c = py::none(), d = py::none(), theta = py::none();
  if (py::isinstance<py::dict>(obj)) {
    py::dict dict = py::reinterpret_borrow<py::dict>(obj);
    for (auto item : dict) {
      const std::string key = py::str(item.first);
      if (key != "A" && key != "b" && key != "C" && key != "d" && key != "theta")
        throw py::key_error("unknown level key '" + key + "'");
    }
    a = dict["A"];
    b = dict["b"];
    if (dict.contains("C")) c = dict["C"];
    if (dict.contains("d")) d = dict["d"];
    if (dict.contains("theta")) theta = dict["theta"];
  } else {
    py::tuple t = py::tuple(py::reinterpret_borrow<py::object>(obj));
    if (t.size() != 2 && t.size() != 4 && t.size() != 5)
      throw py::value_error("a level tuple is (A, b), (A, b, C, d) or (A, b, C, d, theta)");
    a = t[0];
    b = t[1];
    if (t.size() >= 4) {
      c = t[2];
      d = t[3];
    }
    if (t.size() == 5) theta = t[4];
  }
  level.A = a.cast<Mat>();
  level.b = as_vector(b);
  level.C = as_matrix(c, level.A.cols());
  level.d = as_vector(d);
  if (!theta.is_none()) level.theta = theta.cast<double>();
  return level;
}

Hierarchy to_hierarchy(const py::sequence& levels) {
  std::vector<TaskLevel> out;
  for (auto item : levels) out.push_back(to_level(item));
  if (out.empty()) throw py::value_error("at least one level is required");
  const Index n = out.front().A.cols();
  return Hierarchy(std::move(out), n);
}

py::dict level_diag(const LevelDiag& d) {
  py::dict out;
  out["mu1"] = d.mu1;
  out["mu2"] = d.mu2;
  out["s"] = d.s_star;
  out["alpha"] = d.alpha_star;
  out["eta"] = d.eta;
  out["saturated"] = d.saturated;
  out["error_norm"] = d.error_norm;
  out["angle_dev"] = d.angle_dev;
  out["iterations"] = d.iterations;
  out["fallback"] = d.fallback;
  out["status"] = std::string(to_string(d.status));
  return out;
}

py::dict solve_py(const py::sequence& levels, const std::string& solver) {
  const auto backend = parse_backend(solver);
  if (!backend) throw py::value_error("unknown solver '" + solver + "'; expected one of " + std::string(kBackendNames));
  const SolveOutcome r = solve(to_hierarchy(levels), *backend);
  py::dict out;
  out["u"] = r.u;
  out["status"] = std::string(to_string(r.status));
  out["iterations"] = r.iterations;
  py::list per;
  for (const LevelDiag& d : r.per_level) per.append(level_diag(d));
  out["levels"] = per;
  return out;
}

DampingMode parse_mode(const std::string& mode) {
  if (mode == "fixed") return DampingMode::Fixed;
  if (mode == "variable") return DampingMode::Variable;
  throw py::value_error("mode must be 'fixed' or 'variable'");
}

py::dict run_py(const std::string& path, const std::string& solver, const std::vector<std::string>& overrides) {
  const auto backend = parse_backend(solver);
  if (!backend) throw py::value_error("unknown solver '" + solver + "'");
  const Scenario sc = load_scenario(path, overrides);
  TraceLog trace;
  {
    py::gil_scoped_release release;
    trace = run(sc, *backend);
  }
  const auto n = static_cast<Index>(trace.rows.size());
  Vec t(n), angle(n), eta(n), s(n);
  Mat q(n, trace.dofs), x(n, 3), v(n, 3), v_a(n, 3), f(n, 3);
  std::vector<bool> blocked;
  std::vector<std::string> status;
  for (Index i = 0; i < n; ++i) {
    const TraceRow& r = trace.rows[static_cast<std::size_t>(i)];
    t(i) = r.t;
    angle(i) = r.angle_dev_deg;
    eta(i) = r.eta;
    s(i) = r.s;
    q.row(i) = r.q.transpose();
    x.row(i) = r.x.transpose();
    v.row(i) = r.v.transpose();
    v_a.row(i) = r.v_a.transpose();
    f.row(i) = r.f.transpose();
    blocked.push_back(r.blocked);
    status.emplace_back(to_string(r.status));
  }
  py::dict out;
  out["t"] = t;
  out["q"] = q;
  out["x"] = x;
  out["v"] = v;
  out["v_a"] = v_a;
  out["f"] = f;
  out["angle_dev_deg"] = angle;
  out["eta"] = eta;
  out["s"] = s;
  out["blocked"] = blocked;
  out["status"] = status;
  out["metrics"] = py::module_::import("json").attr("loads")(to_json(metrics(trace, metrics_options(sc))).dump());
  return out;
}

}  // namespace

PYBIND11_MODULE(_dchier, m) {
  m.doc() = "Direction-constrained hierarchical control";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BracketError>(m, "BracketError", PyExc_RuntimeError);

  m.def("pinv", [](const Mat& a, double tol) { return pinv(a, tol); }, py::arg("a"), py::arg("tol") = 0.0);
  m.def("null_projector", &null_projector, py::arg("a"));
  m.def("angle", &angle, py::arg("a"), py::arg("b"));

  m.def(
      "get_range",
      [](const Vec& z, const Vec& r, const Vec& d) {
        const ScalingRange g = get_range(z, r, d);
        py::dict out;
        out["s_min"] = g.s_min;
        out["s_max"] = g.s_max;
        out["critical_row"] = g.critical_row ? py::cast(*g.critical_row) : py::none();
        out["guarded"] = g.guarded;
        return out;
      },
      py::arg("z"), py::arg("r"), py::arg("d"));

  m.def("solve", &solve_py, py::arg("levels"), py::arg("solver") = "dc",
        "Solves a hierarchy given as a list of levels, highest priority first.");

  m.def(
      "merge",
      [](const Vec& mu1, const Vec& mu2, const Mat& a, const Vec& b, double theta) {
        const MergeResult r = merge(mu1, mu2, TaskLevel::equality(a, b, theta));
        py::dict out;
        out["u"] = r.u;
        out["eta"] = r.eta;
        out["mu2"] = r.mu2;
        out["corrected"] = r.corrected;
        out["angle"] = r.achieved_angle;
        return out;
      },
      py::arg("mu1"), py::arg("mu2"), py::arg("A"), py::arg("b"), py::arg("theta"));

  m.def("steady_deviation", &steady_deviation, py::arg("f"), py::arg("v"), py::arg("kappa1"), py::arg("kappa2"));

  m.def(
      "admittance_step",
      [](const Vec& v_a, const Vec& chi, const Vec& f, const Vec& v_robot, const Vec& mass,
         const Vec& damping, const std::string& mode, double kappa1, double kappa2, double d_min, double dt) {
        AdmittanceParams p;
        p.mass = mass;
        p.fixed_damping = damping;
        p.mode = parse_mode(mode);
        p.kappa1 = kappa1;
        p.kappa2 = kappa2;
        p.d_min = d_min;
        p.dt = dt;
        p.validate();
        AdmittanceState s = AdmittanceState::at_rest(p);
        s.v_a = v_a;
        s.chi = chi;
        const AdmittanceState next = step(s, f, v_robot, p);
        return py::make_tuple(next.v_a, next.chi, next.damping);
      },
      py::arg("v_a"), py::arg("chi"), py::arg("f"), py::arg("v_robot"), py::arg("mass"), py::arg("damping"),
      py::arg("mode") = "variable", py::arg("kappa1") = 30.0, py::arg("kappa2") = 30.0, py::arg("d_min") = 20.0,
      py::arg("dt") = 0.005, "One admittance tick; returns (v_a, chi, damping).");

  m.def(
      "forward_kinematics",
      [](const std::string& preset, const Vec& q) {
        const Pose p = forward_kinematics(robot_preset(preset), q);
        Eigen::Vector4d quat(p.orientation.w(), p.orientation.x(), p.orientation.y(), p.orientation.z());
        return py::make_tuple(Vec(p.position), Vec(quat));
      },
      py::arg("preset"), py::arg("q"), "Returns (position, quaternion w, x, y, z).");
  m.def(
      "jacobian", [](const std::string& preset, const Vec& q) { return jacobian(robot_preset(preset), q); },
      py::arg("preset"), py::arg("q"));

  m.def("run_scenario", &run_py, py::arg("path"), py::arg("solver") = "dc",
        py::arg("overrides") = std::vector<std::string>{},
        "Runs a scenario file and returns trace arrays plus a metrics dict.");
}
