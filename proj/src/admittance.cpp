#include "dchier/admittance.hpp"

#include <cmath>
#include <string>

namespace dchier {

AdmittanceParams AdmittanceParams::defaults(Index axes) {
  AdmittanceParams p;
  p.mass = Vec::Constant(axes, 10.0);
  p.fixed_damping = Vec::Constant(axes, 30.0);
  return p;
}

void AdmittanceParams::validate() const {
  if (mass.size() == 0) throw InvalidInput("admittance: no axes");
  require_finite(mass, "admittance mass");
  if ((mass.array() <= 0.0).any()) throw InvalidInput("admittance: mass must be positive");
  if (fixed_damping.size() != mass.size())
    throw InvalidInput("admittance: fixed_damping must match mass");
  require_finite(fixed_damping, "admittance fixed_damping");
  if ((fixed_damping.array() < 0.0).any())
    throw InvalidInput("admittance: fixed_damping must be nonnegative");
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw InvalidInput("admittance: kappa1, kappa2 must be positive");
  if (!(d_min > 0.0)) throw InvalidInput("admittance: d_min must be positive");
  if (!(dt > 0.0)) throw InvalidInput("admittance: dt must be positive");
}

AdmittanceState AdmittanceState::at_rest(const AdmittanceParams& params) {
  AdmittanceState s;
  s.v_a = Vec::Zero(params.axes());
  s.chi = Vec::Zero(params.axes());
  s.damping = params.mode == DampingMode::Fixed
                  ? params.fixed_damping
                  : Vec::Constant(params.axes(), std::max(params.kappa1, params.d_min));
  return s;
}

namespace {

void check_axes(const Vec& v, const AdmittanceParams& params, const char* what) {
  if (v.size() != params.axes())
    throw InvalidInput(std::string("admittance: ") + what + " has wrong dimension");
}

}  // namespace

Vec update_damping(const AdmittanceState& state, const Vec& f_ext, const AdmittanceParams& params) {
  check_axes(f_ext, params, "force");
  check_axes(state.chi, params, "chi");
  Vec out(params.axes());
  for (Index i = 0; i < out.size(); ++i) {
    const double d = params.kappa1 * std::exp(sign_of(f_ext(i)) * params.kappa2 * state.chi(i));
    out(i) = std::max(d, params.d_min);
  }
  return out;
}

AdmittanceState step(const AdmittanceState& state, const Vec& f_ext, const Vec& v_robot,
                     const AdmittanceParams& params) {
  check_axes(f_ext, params, "force");
  check_axes(v_robot, params, "robot velocity");
  check_axes(state.v_a, params, "v_a");
  require_finite(f_ext, "admittance force");
  require_finite(v_robot, "admittance robot velocity");

  AdmittanceState next;
  next.chi = state.v_a - v_robot;
  if (params.mode == DampingMode::Variable) {
    AdmittanceState probe = state;
    probe.chi = next.chi;
    next.damping = update_damping(probe, f_ext, params);
  } else {
    next.damping = params.fixed_damping;
  }
  const double dt = params.dt;
  next.v_a = ((state.v_a.array() + dt * f_ext.array() / params.mass.array()) /
              (1.0 + dt * next.damping.array() / params.mass.array()))
                 .matrix();
  return next;
}

double steady_deviation(double f, double v, double kappa1, double kappa2) {
  if (f == 0.0) throw InvalidInput("steady_deviation: f must be nonzero");
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0))
    throw InvalidInput("steady_deviation: kappa1, kappa2 must be positive");
  if (!std::isfinite(f) || !std::isfinite(v)) throw InvalidInput("steady_deviation: non-finite input");

  const double sg = sign_of(f);
  auto g = [&](double chi) { return (chi + v) * kappa1 * std::exp(sg * kappa2 * chi) - f; };

  // g(-v) = -f, and the other end of the bracket has the sign of f: the plain
  // damping equilibrium f / kappa1 - v when it lies on the far side of zero,
  // otherwise zero itself.
  const double chi0 = f / kappa1 - v;
  double lo = sg > 0.0 ? -v : std::min(chi0, 0.0);
  double hi = sg > 0.0 ? std::max(chi0, 0.0) : -v;
  if (lo == hi) return lo;
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo < 0.0) == (ghi < 0.0)) throw BracketError("steady_deviation: no sign change on bracket");

  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dchier
