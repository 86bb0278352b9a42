#include <cmath>
#include <numbers>

#include "doctest.h"

#include "dchier/solvers.hpp"

using namespace dchier;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Mat row(std::initializer_list<double> v) { return vec(v).transpose(); }

// A = I2, b = [1, 1], u1 <= 0.01.
TaskLevel capped_x(double theta) {
  TaskLevel level = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 1}), theta);
  level.C = row({1, 0});
  level.d = vec({0.01});
  return level;
}

// The capped-x trace by hand: mu1 pins x at the cap and keeps y = 1; mu2
// scales b down to s = 0.01 so both coordinates equal 0.01. The merged point
// keeps x = 0.01 and picks y with atan(y / 0.01) = 45 + 30 degrees.
struct CappedTrace {
  double y = 0.01 * std::tan(75.0 * kDeg);
  double eta = (y - 0.01) / (1.0 - 0.01);
};

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("get_range examples") {
  ScalingRange r = get_range(vec({1, -1}), vec({0.2, 0.3}), vec({1, 0.5}));
  CHECK(r.s_min == doctest::Approx(-0.2));
  CHECK(r.s_max == doctest::Approx(0.8));
  REQUIRE(r.critical_row);
  CHECK(*r.critical_row == 0);
  CHECK_FALSE(r.guarded);

  r = get_range(vec({1}), vec({0}), vec({-1}));
  CHECK(r.s_min == 0.0);
  CHECK(r.s_max == 0.0);
  CHECK(r.guarded);

  r = get_range(vec({1}), vec({0}), vec({2}));
  CHECK(r.s_min == -kRangeSentinel);
  CHECK(r.s_max == doctest::Approx(2.0));

  r = get_range(vec({0, 1}), vec({5, 0}), vec({1, 1}));
  CHECK(r.s_max == doctest::Approx(1.0));
  CHECK(*r.critical_row == 1);

  r = get_range(vec({1, -1}), vec({0, 0}), vec({0.2, -0.5}));
  CHECK(r.guarded);
  CHECK(r.s_min == 0.0);
  CHECK(r.s_max == 0.0);

  CHECK_THROWS_AS(get_range(vec({1}), vec({1, 2}), vec({1})), InvalidInput);
}

TEST_CASE("min_error_step examples") {
  const TaskLevel free = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}));
  MinErrorStep st = min_error_step(free, Vec::Zero(2), Mat::Identity(2, 2), {});
  CHECK((st.mu1 - vec({1, 2})).norm() < 1e-14);

  const TaskLevel cap = capped_x(std::numbers::pi);
  const Index sat[] = {0};
  st = min_error_step(cap, Vec::Zero(2), Mat::Identity(2, 2), sat);
  CHECK((st.mu1 - vec({0.01, 1})).norm() < 1e-12);
  CHECK(std::abs(st.u_tilde(0) - 0.01) < 1e-8);
  CHECK(st.consistent);

  // Level one fixes u1 + u2 = 1; the second level then moves inside that line.
  Mat p1(2, 2);
  p1 << 0.5, -0.5, -0.5, 0.5;
  const Vec u1 = vec({0.5, 0.5});
  const TaskLevel second = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 3}));
  st = min_error_step(second, u1, p1, {});
  CHECK((st.mu1 - vec({-0.5, 1.5})).norm() < 1e-12);
}

TEST_CASE("kkt_check multipliers") {
  const TaskLevel cap = capped_x(std::numbers::pi);
  KktResult k = kkt_check(cap, vec({0.01, 1}), Mat::Identity(2, 2), row({1, 0}));
  REQUIRE(k.lambda.size() == 1);
  CHECK(k.lambda(0) == doctest::Approx(0.99));
  CHECK_FALSE(k.remove_index);

  k = kkt_check(cap, vec({0.01, 1}), Mat::Identity(2, 2), Mat(0, 2));
  CHECK(k.lambda.size() == 0);
  CHECK_FALSE(k.remove_index);

  // u2 <= 2.3 does not bind at the optimum [1, 2], so pinning it is wrong.
  TaskLevel loose = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}));
  loose.C = row({0, 1});
  loose.d = vec({2.3});
  k = kkt_check(loose, vec({1, 2.3}), Mat::Identity(2, 2), row({0, 1}));
  CHECK(k.lambda(0) == doctest::Approx(-0.3));
  REQUIRE(k.remove_index);
  CHECK(*k.remove_index == 0);
}

TEST_CASE("min_angle_step examples") {
  Mat p1(2, 2);
  p1 << 0.5, -0.5, -0.5, 0.5;
  const TaskLevel second = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 3}));
  AngleCandidate c = min_angle_step(second, vec({0.5, 0.5}), p1, ScalingRange{});
  CHECK((c.epsilon - vec({0.5, 0.5})).norm() < 1e-12);
  CHECK((c.gamma - vec({2, 2})).norm() < 1e-12);
  CHECK(c.s == doctest::Approx(0.25));
  CHECK((c.mu2 - vec({0.25, 0.75})).norm() < 1e-12);
  CHECK(c.alpha == doctest::Approx(0.0).epsilon(1e-7));

  // Level one fixes u1 = 1, so b = [0, 1] is fully reachable: gamma = 0.
  Mat p_fixed = Mat::Zero(2, 2);
  p_fixed(1, 1) = 1.0;
  const TaskLevel reach = TaskLevel::equality(Mat::Identity(2, 2), vec({0, 1}));
  c = min_angle_step(reach, vec({1, 0}), p_fixed, ScalingRange{});
  CHECK(c.gamma.norm() < 1e-12);
  CHECK(c.s == 1.0);
  CHECK((c.mu2 - vec({1, 1})).norm() < 1e-12);
  CHECK(c.alpha == doctest::Approx(std::numbers::pi / 4));

  const TaskLevel plain = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}));
  c = min_angle_step(plain, Vec::Zero(2), Mat::Identity(2, 2), ScalingRange{});
  CHECK(c.s == 1.0);
  CHECK(c.alpha == 0.0);

  ScalingRange narrow;
  narrow.s_min = 0.0;
  narrow.s_max = 0.1;
  c = min_angle_step(second, vec({0.5, 0.5}), p1, narrow);
  CHECK(c.s == doctest::Approx(0.1));
}

TEST_CASE("merge example") {
  const TaskLevel level = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 3}), 30.0 * kDeg);
  const MergeResult m = merge(vec({-0.5, 1.5}), vec({0.25, 0.75}), level);
  CHECK(m.eta == doctest::Approx(0.676).epsilon(1e-3));
  CHECK(m.u(0) == doctest::Approx(-0.257).epsilon(2e-3));
  CHECK(m.u(1) == doctest::Approx(1.257).epsilon(2e-3));
  CHECK(std::abs(angle(m.u, level.b) - 30.0 * kDeg) < 1e-8);

  const TaskLevel open = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 3}));
  const MergeResult all = merge(vec({-0.5, 1.5}), vec({0.25, 0.75}), open);
  CHECK(all.eta == 1.0);
  CHECK((all.u - vec({-0.5, 1.5})).norm() == 0.0);

  const TaskLevel wide = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 3}), 80.0 * kDeg);
  CHECK(merge(vec({-0.5, 1.5}), vec({0.25, 0.75}), wide).eta == 1.0);
  CHECK_THROWS_AS(merge(vec({1}), vec({1, 2}), level), InvalidInput);
}

TEST_CASE("merge applies the curvature correction") {
  // nu2 sits past the angle minimiser of the segment, so it is pulled back.
  const TaskLevel level = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 0}), 20.0 * kDeg);
  const MergeResult m = merge(vec({1, 2}), vec({1, -0.5}), level);
  CHECK(m.corrected);
  CHECK(m.tau > 0.0);
  CHECK(std::abs(angle(m.mu2, level.b)) < 1e-9);
  CHECK(std::abs(m.achieved_angle - 20.0 * kDeg) < 1e-8);
}

TEST_CASE("dc_solve capped-x worked trace") {
  const CappedTrace hand;
  const SolveOutcome out = dc_solve(Hierarchy({capped_x(30.0 * kDeg)}, 2));
  CHECK(out.status == SolveStatus::Optimal);
  CHECK(out.u(0) == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(out.u(1) == doctest::Approx(hand.y).epsilon(1e-6));
  const LevelDiag& d = out.per_level[0];
  CHECK((d.mu1 - vec({0.01, 1})).norm() < 1e-9);
  CHECK((d.mu2 - vec({0.01, 0.01})).norm() < 1e-9);
  CHECK(d.eta == doctest::Approx(hand.eta).epsilon(1e-6));
  CHECK(d.s_star == doctest::Approx(0.01));
  CHECK(d.angle_dev == doctest::Approx(30.0 * kDeg));
  REQUIRE(d.saturated.size() == 1);
  CHECK(d.saturated[0] == 0);
}

TEST_CASE("dc_solve reduces to hqp with an open direction limit") {
  const SolveOutcome dc = dc_solve(Hierarchy({capped_x(std::numbers::pi)}, 2));
  const SolveOutcome hqp = hqp_solve(Hierarchy({capped_x(std::numbers::pi)}, 2));
  CHECK((dc.u - vec({0.01, 1})).norm() < 1e-12);
  CHECK((dc.u - hqp.u).norm() < 1e-14);

  const SolveOutcome plain = dc_solve(Hierarchy({TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}))}, 2));
  CHECK((plain.u - vec({1, 2})).norm() < 1e-14);
}

TEST_CASE("hqp_solve examples") {
  TaskLevel level = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}));
  level.C = row({0, 1});
  level.d = vec({1});
  CHECK((hqp_solve(Hierarchy({level}, 2)).u - vec({1, 1})).norm() < 1e-12);

  Mat a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  const SolveOutcome free = hqp_solve(Hierarchy({TaskLevel::equality(a, vec({1, 2}))}, 3));
  CHECK((free.u - pinv(a) * vec({1, 2})).norm() < 1e-12);

  const TaskLevel fix = TaskLevel::equality(row({1, 0}), vec({0}));
  const TaskLevel pull = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 1}));
  const SolveOutcome two = hqp_solve(Hierarchy({fix, pull}, 2));
  CHECK((two.u - vec({0, 1})).norm() < 1e-12);
}

TEST_CASE("scaling_solve examples") {
  TaskLevel level = TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}));
  level.C = row({0, 1});
  level.d = vec({1});
  const SolveOutcome s = scaling_solve(Hierarchy({level}, 2));
  CHECK((s.u - vec({0.5, 1})).norm() < 1e-12);
  CHECK(s.per_level[0].s_star == doctest::Approx(0.5));
  CHECK(s.per_level[0].angle_dev < 1e-12);

  // The row leaves no room in the task direction: the robot is blocked.
  level.d = vec({0});
  const SolveOutcome blocked = scaling_solve(Hierarchy({level}, 2));
  CHECK(blocked.u.norm() < 1e-12);
  CHECK(blocked.per_level[0].s_star == 0.0);

  const SolveOutcome free = scaling_solve(Hierarchy({TaskLevel::equality(Mat::Identity(2, 2), vec({1, 2}))}, 2));
  CHECK((free.u - vec({1, 2})).norm() < 1e-14);
  CHECK(free.per_level[0].s_star == 1.0);
}

TEST_CASE("backend names") {
  CHECK(parse_backend("dc") == Backend::DirectionConstrained);
  CHECK(parse_backend("hqp") == Backend::Hqp);
  CHECK(parse_backend("scaling") == Backend::Scaling);
  CHECK_FALSE(parse_backend("bogus"));
  CHECK(to_string(Backend::Scaling) == "scaling");
  CHECK(to_string(SolveStatus::IterationLimit) == "iteration_limit");
}

}
