#pragma once

#include <numbers>
#include <utility>
#include <vector>

#include "dchier/numerics.hpp"

namespace dchier {

/// One priority level: A u = b (relaxed), C u <= d (hard), angle(A u, b) <= theta.
struct TaskLevel {
  Mat A;
  Vec b;
  Mat C;  // may have zero rows
  Vec d;
  double theta = std::numbers::pi;  // radians; pi disables the direction limit

  /// Level with no inequality rows.
  static TaskLevel equality(Mat a, Vec b, double theta = std::numbers::pi);

  Index cols() const { return A.cols(); }
  void validate(Index n) const;
};

/// Ordered stack of levels, index 0 is the highest priority.
class Hierarchy {
 public:
  Hierarchy(std::vector<TaskLevel> levels, Index n);

  const std::vector<TaskLevel>& levels() const { return levels_; }
  std::vector<TaskLevel>& levels() { return levels_; }
  Index dofs() const { return n_; }
  std::size_t size() const { return levels_.size(); }
  Index total_inequality_rows() const;

  /// Inequality rows of levels [0, k] stacked in level order.
  std::pair<Mat, Vec> stacked_inequalities(std::size_t k) const;

  void validate() const;

 private:
  std::vector<TaskLevel> levels_;
  Index n_;
};

struct BoundSpec {
  Vec lower;
  Vec upper;
  Vec lower_rate;
  Vec upper_rate;
  Mat gain;

  void validate() const;
};

struct VelocityBounds {
  Vec lower;
  Vec upper;
};

struct InequalityRows {
  Mat C;
  Vec d;
};

/// x_d_dot + K (x_d - x).
Vec reference_velocity(const Vec& x_d_dot, const Vec& x_d, const Vec& x, const Mat& gain);

/// Velocity corridor that steers x back inside [lower, upper] at rate K.
VelocityBounds shape_bounds(const BoundSpec& spec, const Vec& x);

/// Rewrites v_lower <= J u <= v_upper as [-J; J] u <= [-v_lower; v_upper].
InequalityRows to_two_sided_rows(const Mat& j, const Vec& v_lower, const Vec& v_upper);

/// Appends rows (C2, d2) below (C, d).
void append_rows(Mat& c, Vec& d, const Mat& c2, const Vec& d2);

}  // namespace dchier
