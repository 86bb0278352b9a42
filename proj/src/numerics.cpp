#include "dchier/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace dchier {

bool all_finite(const Mat& m) { return m.size() == 0 || m.allFinite(); }

void require_finite(const Mat& m, const char* what) {
  if (!all_finite(m)) throw InvalidInput(std::string(what) + ": non-finite entry");
}

Mat pinv(const Mat& m, double tol) {
  require_finite(m, "pinv");
  if (tol < 0.0) throw InvalidInput("pinv: negative tolerance");
  if (m.rows() == 0 || m.cols() == 0) return Mat::Zero(m.cols(), m.rows());

  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  // The absolute floor keeps round-off left in projected matrices from being inverted.
  const double cutoff =
      tol > 0.0 ? tol
                : std::max(static_cast<double>(std::max(m.rows(), m.cols())) * sigma_max * 1e-12,
                           kPinvFloor);

  Vec inv = Vec::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Mat null_projector(const Mat& a) {
  require_finite(a, "null_projector");
  const Index n = a.cols();
  return Mat::Identity(n, n) - pinv(a) * a;
}

double angle(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("angle: dimension mismatch");
  require_finite(a, "angle");
  require_finite(b, "angle");
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kZeroNorm || nb < kZeroNorm) return 0.0;
  // Kahan's form stays accurate near 0 and pi where acos loses digits.
  const Vec ua = a / na;
  const Vec ub = b / nb;
  return 2.0 * std::atan2((ua - ub).norm(), (ua + ub).norm());
}

Decomposition decompose(const Mat& a, const Mat& a_restricted, const Vec& y) {
  if (a.rows() != a_restricted.rows() || a.cols() != a_restricted.cols())
    throw InvalidInput("decompose: A and A_restricted must have equal shapes");
  if (y.size() != a.rows()) throw InvalidInput("decompose: y must live in the task space of A");
  require_finite(a, "decompose");
  require_finite(a_restricted, "decompose");
  require_finite(y, "decompose");

  Decomposition out;
  out.col_part = a * (pinv(a_restricted) * y);
  out.null_part = y - out.col_part;
  return out;
}

}  // namespace dchier
