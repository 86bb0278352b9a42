#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace dchier {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised for non-finite data or inconsistent dimensions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Norm below which a vector is treated as zero by angle() and friends.
inline constexpr double kZeroNorm = 1e-10;
/// Singular values at or below this are treated as zero by pinv.
inline constexpr double kPinvFloor = 1e-10;

bool all_finite(const Mat& m);
void require_finite(const Mat& m, const char* what);

/// Moore-Penrose pseudo-inverse through SVD.
///
/// With tol == 0 singular values at or below max(rows, cols) * sigma_max * 1e-12
/// or kPinvFloor
/// are discarded; a positive tol is used as an absolute cutoff instead.
Mat pinv(const Mat& m, double tol = 0.0);

/// I - pinv(A) * A, the orthogonal projector onto the null space of A.
Mat null_projector(const Mat& a);

/// Angle between two vectors in [0, pi]. Returns 0 when either vector has
/// norm below kZeroNorm, so a robot at rest never violates a direction limit.
double angle(const Vec& a, const Vec& b);

struct Decomposition {
  Vec null_part;  ///< component outside the column space of A_restricted
  Vec col_part;   ///< component inside the column space of A_restricted
};

/// Splits task-space vector y into the part reachable through A_restricted
/// (col_part = A * pinv(A_restricted) * y) and its orthogonal remainder.
Decomposition decompose(const Mat& a, const Mat& a_restricted, const Vec& y);

/// Clamp helper that tolerates lo > hi by preferring lo.
inline double clamp_range(double v, double lo, double hi) {
  if (v > hi) v = hi;
  if (v < lo) v = lo;
  return v;
}

}  // namespace dchier
