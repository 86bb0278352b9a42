#pragma once

#include <stdexcept>

#include "dchier/numerics.hpp"

namespace dchier {

enum class DampingMode { Fixed, Variable };

struct AdmittanceParams {
  Vec mass;           // diagonal of M, kg
  DampingMode mode = DampingMode::Variable;
  Vec fixed_damping;  // diagonal of D, N s/m
  double kappa1 = 30.0;
  double kappa2 = 30.0;
  double d_min = 20.0;
  double dt = 0.005;

  static AdmittanceParams defaults(Index axes);
  Index axes() const { return mass.size(); }
  void validate() const;
};

struct AdmittanceState {
  Vec v_a;
  Vec damping;
  Vec chi;

  static AdmittanceState at_rest(const AdmittanceParams& params);
};

/// Raised when steady_deviation cannot bracket a root.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// D_i = max(kappa1 exp(sign(f_i) kappa2 chi_i), d_min), using state.chi.
Vec update_damping(const AdmittanceState& state, const Vec& f_ext, const AdmittanceParams& params);

/// One tick: chi from the previous v_a and v_robot, damping update, then the
/// semi-implicit velocity update.
AdmittanceState step(const AdmittanceState& state, const Vec& f_ext, const Vec& v_robot,
                     const AdmittanceParams& params);

/// chi solving (chi + v) kappa1 exp(sign(f) kappa2 chi) = f, by bisection to 1e-9.
double steady_deviation(double f, double v, double kappa1, double kappa2);

}  // namespace dchier
