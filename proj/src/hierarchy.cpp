#include "dchier/hierarchy.hpp"

#include <cmath>
#include <string>

namespace dchier {

TaskLevel TaskLevel::equality(Mat a, Vec b, double theta) {
  TaskLevel level;
  const Index n = a.cols();
  level.A = std::move(a);
  level.b = std::move(b);
  level.C = Mat::Zero(0, n);
  level.d = Vec::Zero(0);
  level.theta = theta;
  return level;
}

void TaskLevel::validate(Index n) const {
  if (A.cols() != n) throw InvalidInput("task level: A has wrong column count");
  if (A.rows() != b.size()) throw InvalidInput("task level: A and b row counts differ");
  if (C.rows() > 0 && C.cols() != n) throw InvalidInput("task level: C has wrong column count");
  if (C.rows() != d.size()) throw InvalidInput("task level: C and d row counts differ");
  if (!(theta >= 0.0 && theta <= std::numbers::pi))
    throw InvalidInput("task level: theta outside [0, pi]");
  require_finite(A, "task level A");
  require_finite(b, "task level b");
  require_finite(C, "task level C");
  require_finite(d, "task level d");
}

Hierarchy::Hierarchy(std::vector<TaskLevel> levels, Index n) : levels_(std::move(levels)), n_(n) {
  for (auto& level : levels_) {
    if (level.C.rows() == 0 && level.C.cols() != n_) level.C = Mat::Zero(0, n_);
  }
  validate();
}

void Hierarchy::validate() const {
  if (levels_.empty()) throw InvalidInput("hierarchy: no levels");
  if (n_ < 1) throw InvalidInput("hierarchy: joint dimension must be positive");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    try {
      levels_[k].validate(n_);
    } catch (const InvalidInput& e) {
      throw InvalidInput("level " + std::to_string(k) + ": " + e.what());
    }
  }
}

Index Hierarchy::total_inequality_rows() const {
  Index rows = 0;
  for (const auto& level : levels_) rows += level.C.rows();
  return rows;
}

std::pair<Mat, Vec> Hierarchy::stacked_inequalities(std::size_t k) const {
  Index rows = 0;
  for (std::size_t i = 0; i <= k; ++i) rows += levels_[i].C.rows();
  Mat c(rows, n_);
  Vec d(rows);
  Index at = 0;
  for (std::size_t i = 0; i <= k; ++i) {
    const Index r = levels_[i].C.rows();
    if (r == 0) continue;
    c.middleRows(at, r) = levels_[i].C;
    d.segment(at, r) = levels_[i].d;
    at += r;
  }
  return {c, d};
}

void BoundSpec::validate() const {
  const Index m = lower.size();
  if (upper.size() != m || lower_rate.size() != m || upper_rate.size() != m)
    throw InvalidInput("bound spec: dimension mismatch");
  if (gain.rows() != m || gain.cols() != m) throw InvalidInput("bound spec: gain must be m x m");
  if ((lower.array() > upper.array()).any()) throw InvalidInput("bound spec: lower > upper");
  if (!gain.isApprox(gain.transpose(), 1e-12)) throw InvalidInput("bound spec: gain not symmetric");
  if (m > 0) {
    Eigen::LLT<Mat> llt(gain);
    if (llt.info() != Eigen::Success) throw InvalidInput("bound spec: gain not positive definite");
  }
}

Vec reference_velocity(const Vec& x_d_dot, const Vec& x_d, const Vec& x, const Mat& gain) {
  const Index m = x.size();
  if (x_d_dot.size() != m || x_d.size() != m || gain.rows() != m || gain.cols() != m)
    throw InvalidInput("reference_velocity: dimension mismatch");
  return x_d_dot + gain * (x_d - x);
}

VelocityBounds shape_bounds(const BoundSpec& spec, const Vec& x) {
  spec.validate();
  if (x.size() != spec.lower.size()) throw InvalidInput("shape_bounds: dimension mismatch");
  return {spec.lower_rate + spec.gain * (spec.lower - x),
          spec.upper_rate + spec.gain * (spec.upper - x)};
}

InequalityRows to_two_sided_rows(const Mat& j, const Vec& v_lower, const Vec& v_upper) {
  const Index m = j.rows();
  if (v_lower.size() != m || v_upper.size() != m)
    throw InvalidInput("to_two_sided_rows: dimension mismatch");
  InequalityRows rows;
  rows.C.resize(2 * m, j.cols());
  rows.d.resize(2 * m);
  rows.C.topRows(m) = -j;
  rows.C.bottomRows(m) = j;
  rows.d.head(m) = -v_lower;
  rows.d.tail(m) = v_upper;
  return rows;
}

void append_rows(Mat& c, Vec& d, const Mat& c2, const Vec& d2) {
  if (c2.rows() == 0) return;
  if (c.rows() > 0 && c.cols() != c2.cols()) throw InvalidInput("append_rows: column mismatch");
  Mat c_new(c.rows() + c2.rows(), c2.cols());
  Vec d_new(d.size() + d2.size());
  if (c.rows() > 0) c_new.topRows(c.rows()) = c;
  c_new.bottomRows(c2.rows()) = c2;
  if (d.size() > 0) d_new.head(d.size()) = d;
  d_new.tail(d2.size()) = d2;
  c = std::move(c_new);
  d = std::move(d_new);
}

}  // namespace dchier
