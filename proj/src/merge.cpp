#include <algorithm>
#include <cmath>

#include "dchier/solvers.hpp"

namespace dchier {

namespace {

double segment_angle(const Vec& nu1, const Vec& nu2, const Vec& b, double eta) {
  return angle(eta * nu1 + (1.0 - eta) * nu2, b);
}

// Roots of the squared cosine equality; nullopt if none lands on the boundary.
std::optional<double> closed_form_eta(const Vec& nu1, const Vec& nu2, const Vec& b, double theta) {
  const Vec q = nu1 - nu2;
  const double c = std::cos(theta);
  const double bb = b.squaredNorm();
  const double bp = b.dot(nu2);
  const double bq = b.dot(q);
  const double qa = bq * bq - c * c * bb * q.squaredNorm();
  const double qb = 2.0 * (bp * bq - c * c * bb * nu2.dot(q));
  const double qc = bp * bp - c * c * bb * nu2.squaredNorm();

  double roots[2];
  int count = 0;
  if (std::abs(qa) < 1e-14 * (std::abs(qb) + std::abs(qc) + 1e-300)) {
    if (qb != 0.0) roots[count++] = -qc / qb;
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Citardauq form for the smaller root.
    const double t = -0.5 * (qb + std::copysign(sq, qb));
    roots[count++] = t / qa;
    if (t != 0.0) roots[count++] = qc / t;
  }

  std::optional<double> best;
  for (int i = 0; i < count; ++i) {
    const double eta = roots[i];
    if (!(eta >= -1e-12 && eta <= 1.0 + 1e-12)) continue;
    const double e = std::clamp(eta, 0.0, 1.0);
    if (std::abs(segment_angle(nu1, nu2, b, e) - theta) > 1e-10) continue;
    if (!best || e > *best) best = e;
  }
  return best;
}

double bisect_eta(const Vec& nu1, const Vec& nu2, const Vec& b, double theta) {
  double lo = 0.0;  // angle(lo) < theta
  double hi = 1.0;  // angle(hi) > theta
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (segment_angle(nu1, nu2, b, mid) <= theta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

MergeResult merge(const Vec& mu1, const Vec& mu2_in, const TaskLevel& level) {
  const Mat& a = level.A;
  const Vec& b = level.b;
  if (mu1.size() != a.cols() || mu2_in.size() != a.cols())
    throw InvalidInput("merge: candidate size does not match A");
  if (b.size() != a.rows()) throw InvalidInput("merge: b does not match A");

  MergeResult out;
  out.mu2 = mu2_in;
  const Vec nu1 = a * mu1;
  Vec nu2 = a * out.mu2;

  const double rho = nu1.dot(nu2);
  const double delta1 = nu1.squaredNorm();
  const double delta2 = nu2.squaredNorm();
  const double sigma1 = nu1.dot(b);
  const double sigma2 = nu2.dot(b);
  const double slope = rho * sigma2 - sigma1 * delta2;
  const double scale = std::abs(rho * sigma2) + std::abs(sigma1 * delta2);
  if (slope < -1e-12 * scale) {
    const double tau = (sigma1 * rho - delta1 * sigma2) / slope;
    if (tau > 0.0 && std::isfinite(tau)) {
      // Move mu2 to the angle minimiser on the segment so the angle grows with eta.
      out.mu2 = (mu1 + tau * out.mu2) / (1.0 + tau);
      nu2 = a * out.mu2;
      out.corrected = true;
      out.tau = tau;
    }
  }

  const double theta = level.theta;
  const double angle1 = angle(nu1, b);
  if (angle1 <= theta) {
    out.u = mu1;
    out.eta = 1.0;
    out.achieved_angle = angle1;
    return out;
  }
  const double angle2 = angle(nu2, b);
  if (angle2 >= theta) {
    out.u = out.mu2;
    out.eta = 0.0;
    out.achieved_angle = angle2;
    return out;
  }

  double eta = bisect_eta(nu1, nu2, b, theta);
  if (auto closed = closed_form_eta(nu1, nu2, b, theta)) {
    // Bisection brackets the crossing; the closed form only refines it.
    if (std::abs(*closed - eta) < 1e-6) eta = *closed;
  }
  out.eta = eta;
  out.u = eta * mu1 + (1.0 - eta) * out.mu2;
  out.achieved_angle = segment_angle(nu1, nu2, b, eta);
  return out;
}

}  // namespace dchier
