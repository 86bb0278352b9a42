#include <numbers>
#include <random>

#include "doctest.h"

#include "dchier/hierarchy.hpp"

using namespace dchier;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

BoundSpec unit_box(double gain) {
  BoundSpec s;
  s.lower = v1(-1);
  s.upper = v1(1);
  s.lower_rate = v1(0);
  s.upper_rate = v1(0);
  s.gain = Mat::Constant(1, 1, gain);
  return s;
}

}  // namespace

TEST_SUITE("hierarchy") {

TEST_CASE("reference velocity") {
  const Mat k = Mat::Constant(1, 1, 2.0);
  CHECK(reference_velocity(v1(0), v1(0.3), v1(0.3), k)(0) == 0.0);
  CHECK(reference_velocity(v1(0), v1(1), v1(0.5), k)(0) == doctest::Approx(1.0));
  CHECK(reference_velocity(v1(0.1), v1(0.3), v1(0.3), k)(0) == doctest::Approx(0.1));
  CHECK_THROWS_AS(reference_velocity(v1(0), Vec::Zero(2), v1(0), k), InvalidInput);
}

TEST_CASE("shape bounds") {
  VelocityBounds b = shape_bounds(unit_box(2.0), v1(0.5));
  CHECK(b.lower(0) == doctest::Approx(-3.0));
  CHECK(b.upper(0) == doctest::Approx(1.0));

  b = shape_bounds(unit_box(1.0), v1(0.0));
  CHECK(b.lower(0) == doctest::Approx(-1.0));
  CHECK(b.upper(0) == doctest::Approx(1.0));

  b = shape_bounds(unit_box(3.0), v1(1.0));
  CHECK(b.upper(0) == 0.0);

  double prev = 1e9;
  for (double x = -1.0; x <= 1.0; x += 0.1) {
    const double up = shape_bounds(unit_box(2.0), v1(x)).upper(0);
    CHECK(up < prev);
    prev = up;
  }
  CHECK_THROWS_AS(shape_bounds(unit_box(1.0), Vec::Zero(2)), InvalidInput);
}

TEST_CASE("bound spec validation") {
  BoundSpec s = unit_box(1.0);
  s.gain(0, 0) = -1.0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = unit_box(1.0);
  s.lower(0) = 2.0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("two-sided rows") {
  Mat j(1, 2);
  j << 1, 0;
  const InequalityRows rows = to_two_sided_rows(j, v1(-0.01), v1(0.01));
  Mat c(2, 2);
  c << -1, 0, 1, 0;
  CHECK((rows.C - c).norm() == 0.0);
  CHECK(rows.d(0) == doctest::Approx(0.01));
  CHECK(rows.d(1) == doctest::Approx(0.01));

  const InequalityRows square = to_two_sided_rows(Mat::Identity(2, 2), Vec::Constant(2, -0.5), Vec::Constant(2, 0.5));
  CHECK(square.C.rows() == 4);
  CHECK((square.d - Vec::Constant(4, 0.5)).norm() == 0.0);
}

TEST_CASE("two-sided rows agree with a direct bound check") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const Mat j = Mat::NullaryExpr(3, 4, [&] { return g(rng); });
  const Vec lo = Vec::Constant(3, -0.5), hi = Vec::Constant(3, 0.7);
  const InequalityRows rows = to_two_sided_rows(j, lo, hi);
  for (int i = 0; i < 100; ++i) {
    const Vec u = Vec::NullaryExpr(4, [&] { return 0.3 * g(rng); });
    const Vec ju = j * u;
    const bool direct = (ju.array() >= lo.array()).all() && (ju.array() <= hi.array()).all();
    const bool stacked = ((rows.C * u).array() <= rows.d.array()).all();
    CHECK(direct == stacked);
  }
}

TEST_CASE("hierarchy validation and stacking") {
  TaskLevel l1 = TaskLevel::equality(Mat::Identity(1, 2), v1(1));
  l1.C = Mat::Ones(1, 2);
  l1.d = v1(2);
  TaskLevel l2 = TaskLevel::equality(Mat::Identity(2, 2), Vec::Ones(2), 0.5);
  l2.C = Mat::Identity(2, 2);
  l2.d = Vec::Constant(2, 3);
  const Hierarchy h({l1, l2}, 2);
  CHECK(h.total_inequality_rows() == 3);
  const auto [c0, d0] = h.stacked_inequalities(0);
  CHECK(c0.rows() == 1);
  const auto [c1, d1] = h.stacked_inequalities(1);
  CHECK(c1.rows() == 3);
  CHECK(d1(0) == 2.0);
  CHECK(d1(2) == 3.0);
  CHECK(h.levels()[0].theta == std::numbers::pi);

  CHECK_THROWS_AS(Hierarchy({}, 2), InvalidInput);
  TaskLevel bad = l2;
  bad.theta = 4.0;
  CHECK_THROWS_AS(Hierarchy({bad}, 2), InvalidInput);
  bad = l2;
  bad.b = Vec::Ones(3);
  CHECK_THROWS_AS(Hierarchy({bad}, 2), InvalidInput);
  CHECK_THROWS_AS(Hierarchy({l1}, 3), InvalidInput);
}

}
