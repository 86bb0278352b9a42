#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dchier/hierarchy.hpp"
#include "dchier/numerics.hpp"

namespace dchier {

/// Stand-in for an unbounded end of a scaling range.
inline constexpr double kRangeSentinel = 1e18;
/// Rows with |z_i| below this do not depend on the scaling factor.
inline constexpr double kFlatRow = 1e-10;

enum class SolveStatus { Optimal, IterationLimit, Degenerate };
enum class Backend { DirectionConstrained, Hqp, Scaling };

std::string_view to_string(SolveStatus status);
std::string_view to_string(Backend backend);
/// Accepts "dc", "hqp" and "scaling".
std::optional<Backend> parse_backend(std::string_view name);
inline constexpr std::string_view kBackendNames = "dc, hqp, scaling";

/// Interval of s for which r + s z <= d holds row by row.
struct ScalingRange {
  double s_min = -kRangeSentinel;
  double s_max = kRangeSentinel;
  std::optional<Index> critical_row;  // row attaining s_max
  std::optional<Index> lower_row;     // row attaining s_min
  double raw_min = -kRangeSentinel;   // before the empty/negative guard
  double raw_max = kRangeSentinel;
  bool guarded = false;

  bool covers(double s) const { return raw_min <= s && s <= raw_max; }
};

ScalingRange get_range(const Vec& z, const Vec& r, const Vec& d);

// The per-iteration primitives below read level.C / level.d as the stacked
// inequality rows of every level up to and including the current one.

struct MinErrorStep {
  Vec mu1;
  Mat P_tilde;
  Vec u_tilde;
  Mat A_tilde_pinv;               // pinv(A * P_tilde)
  double saturation_residual = 0;  // max |C_sat u_tilde - d_sat|
  bool consistent = true;          // saturated rows are simultaneously attainable
};

MinErrorStep min_error_step(const TaskLevel& level, const Vec& u_prev, const Mat& P_prev,
                            std::span<const Index> saturated);

struct KktResult {
  Vec lambda;
  std::optional<Index> remove_index;  // position inside the saturation set
};

KktResult kkt_check(const TaskLevel& level, const Vec& mu1, const Mat& P_prev, const Mat& C_sat);

struct AngleCandidate {
  Vec mu2;
  double alpha = 0;
  double s = 1;
  Vec epsilon;  // uncontrollable part of A u_tilde
  Vec gamma;    // unreachable part of b
};

AngleCandidate min_angle_step(const TaskLevel& level, const Vec& u_tilde, const Mat& P_tilde,
                              const ScalingRange& range);

struct MergeResult {
  Vec u;
  double eta = 1;
  Vec mu2;             // after the curvature correction
  bool corrected = false;
  double tau = 0;
  double achieved_angle = 0;
};

/// Largest-eta point of eta*mu1 + (1-eta)*mu2 that respects level.theta.
MergeResult merge(const Vec& mu1, const Vec& mu2, const TaskLevel& level);

struct ActiveSetResult {
  Vec u;
  bool feasible = true;   // false leaves u at the least-violation point
  bool converged = false;
  int iterations = 0;
};

/// Minimum-error point of a level through a primal active set, searched over
/// u_prev + range(P_prev). Used when the saturation loop stalls.
ActiveSetResult min_error_active_set(const TaskLevel& level, const Vec& u_prev, const Mat& P_prev,
                                     const std::optional<Vec>& start);

struct LevelDiag {
  Vec mu1;
  Vec mu2;
  double s_star = 0;
  double alpha_star = 0;
  double eta = 1;
  std::vector<Index> saturated;  // indices into the stacked rows of levels 0..k
  double error_norm = 0;
  double angle_dev = 0;
  int iterations = 0;
  bool fallback = false;  // the active-set search replaced the saturation loop
  SolveStatus status = SolveStatus::Optimal;
};

struct SolveOutcome {
  Vec u;
  std::vector<LevelDiag> per_level;
  int iterations = 0;
  SolveStatus status = SolveStatus::Optimal;
};

SolveOutcome dc_solve(const Hierarchy& h);
SolveOutcome hqp_solve(const Hierarchy& h);
SolveOutcome scaling_solve(const Hierarchy& h);
SolveOutcome solve(const Hierarchy& h, Backend backend);

}  // namespace dchier
