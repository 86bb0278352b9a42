#include <algorithm>
#include <cmath>
#include <limits>

#include "dchier/solvers.hpp"

namespace dchier {

namespace {

bool negligible(const Vec& v, double scale) {
  return v.norm() <= kZeroNorm * std::max(1.0, scale);
}

void check_level_shapes(const TaskLevel& level, const Mat& p) {
  const Index n = level.A.cols();
  if (p.rows() != n || p.cols() != n) throw InvalidInput("projector has wrong shape");
  if (level.b.size() != level.A.rows()) throw InvalidInput("b does not match A");
  if (level.C.rows() != level.d.size()) throw InvalidInput("d does not match C");
  if (level.C.rows() > 0 && level.C.cols() != n) throw InvalidInput("C has wrong column count");
}

}  // namespace

ScalingRange get_range(const Vec& z, const Vec& r, const Vec& d) {
  if (z.size() != r.size() || z.size() != d.size())
    throw InvalidInput("get_range: z, r and d must have equal length");
  require_finite(z, "get_range z");
  require_finite(r, "get_range r");
  require_finite(d, "get_range d");

  ScalingRange out;
  for (Index i = 0; i < z.size(); ++i) {
    if (std::abs(z(i)) < kFlatRow) continue;
    const double s = (d(i) - r(i)) / z(i);
    if (z(i) < 0.0) {
      if (!out.lower_row || s > out.raw_min) {
        out.raw_min = s;
        out.lower_row = i;
      }
    } else if (!out.critical_row || s < out.raw_max) {
      out.raw_max = s;
      out.critical_row = i;
    }
  }
  out.s_min = out.raw_min;
  out.s_max = out.raw_max;
  if (out.s_min > out.s_max || out.s_max < 0.0) {
    out.s_min = out.s_max = 0.0;
    out.guarded = true;
  }
  return out;
}

MinErrorStep min_error_step(const TaskLevel& level, const Vec& u_prev, const Mat& P_prev,
                            std::span<const Index> saturated) {
  check_level_shapes(level, P_prev);
  const Index n = level.A.cols();
  if (u_prev.size() != n) throw InvalidInput("min_error_step: u_prev has wrong size");

  MinErrorStep out;
  if (saturated.empty()) {
    out.P_tilde = P_prev;
    out.u_tilde = u_prev;
  } else {
    const auto ns = static_cast<Index>(saturated.size());
    Mat c_sat(ns, n);
    Vec d_sat(ns);
    for (Index i = 0; i < ns; ++i) {
      const Index row = saturated[static_cast<std::size_t>(i)];
      if (row < 0 || row >= level.C.rows()) throw InvalidInput("min_error_step: bad saturated row");
      c_sat.row(i) = level.C.row(row);
      d_sat(i) = level.d(row);
    }
    const Mat c_tilde_pinv = pinv(c_sat * P_prev);
    out.P_tilde = (Mat::Identity(n, n) - c_tilde_pinv * c_sat) * P_prev;
    out.u_tilde = u_prev + c_tilde_pinv * (d_sat - c_sat * u_prev);
    out.saturation_residual = (c_sat * out.u_tilde - d_sat).cwiseAbs().maxCoeff();
    const double scale = 1.0 + d_sat.cwiseAbs().maxCoeff() + c_sat.norm() * u_prev.norm();
    out.consistent = out.saturation_residual <= 1e-8 * scale;
  }
  out.A_tilde_pinv = pinv(level.A * out.P_tilde);
  out.mu1 = out.u_tilde + out.A_tilde_pinv * (level.b - level.A * out.u_tilde);
  return out;
}

KktResult kkt_check(const TaskLevel& level, const Vec& mu1, const Mat& P_prev, const Mat& C_sat) {
  check_level_shapes(level, P_prev);
  KktResult out;
  if (C_sat.rows() == 0) {
    out.lambda = Vec::Zero(0);
    return out;
  }
  const Mat ap = level.A * P_prev;
  const Mat m = ap * pinv(C_sat * P_prev);
  const Vec w = level.A * mu1 - level.b;
  out.lambda = -(m.transpose() * w);

  const double tol = 1e-10 * std::max(1.0, m.norm() * w.norm());
  Index arg = 0;
  for (Index i = 1; i < out.lambda.size(); ++i) {
    if (out.lambda(i) < out.lambda(arg)) arg = i;
  }
  if (out.lambda(arg) < -tol) out.remove_index = arg;
  return out;
}

AngleCandidate min_angle_step(const TaskLevel& level, const Vec& u_tilde, const Mat& P_tilde,
                              const ScalingRange& range) {
  check_level_shapes(level, P_tilde);
  const Mat& a = level.A;
  const Vec& b = level.b;
  const Mat a_tilde_pinv = pinv(a * P_tilde);
  const Vec a_u = a * u_tilde;

  AngleCandidate out;
  out.gamma = b - a * (a_tilde_pinv * b);
  out.epsilon = a_u - a * (a_tilde_pinv * a_u);

  double s = 1.0;
  if (!negligible(out.gamma, b.norm()) && !negligible(out.epsilon, a_u.norm())) {
    const double eg = out.epsilon.dot(out.gamma);
    s = eg > 0.0 ? out.epsilon.squaredNorm() / eg : 0.0;
    s = std::max(s, 0.0);
  }
  out.s = clamp_range(s, range.s_min, range.s_max);
  out.mu2 = u_tilde + a_tilde_pinv * (out.s * b - a_u);
  out.alpha = angle(a * out.mu2, b);
  return out;
}

}  // namespace dchier
