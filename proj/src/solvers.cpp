#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dchier/solvers.hpp"

namespace dchier {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::DirectionConstrained: return "dc";
    case Backend::Hqp: return "hqp";
    case Backend::Scaling: return "scaling";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "dc") return Backend::DirectionConstrained;
  if (name == "hqp") return Backend::Hqp;
  if (name == "scaling") return Backend::Scaling;
  return std::nullopt;
}

namespace {

constexpr double kAngleTie = 1e-12;

SolveStatus worse(SolveStatus a, SolveStatus b) {
  return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}

double feasibility_tol(double d) { return 1e-9 * (1.0 + std::abs(d)); }

struct Candidate {
  Vec mu2;
  double alpha = std::numbers::pi;
  double s = 0.0;
  bool valid = false;
};

// Candidate ordering: smaller angle first, then s closer to one; the first
// candidate keeps ties.
bool improves(const Candidate& best, double alpha, double s) {
  if (!best.valid) return true;
  if (alpha < best.alpha - kAngleTie) return true;
  return std::abs(alpha - best.alpha) <= kAngleTie && std::abs(s - 1.0) < std::abs(best.s - 1.0);
}

Mat rows_of(const Mat& c, const std::vector<Index>& idx) {
  Mat out(static_cast<Index>(idx.size()), c.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = c.row(idx[i]);
  return out;
}

struct LevelResult {
  Vec u;
  LevelDiag diag;
};

LevelResult solve_level(const TaskLevel& level, const Vec& u_prev, const Mat& P_prev,
                        Backend backend) {
  const Mat& c = level.C;
  const Vec& d = level.d;
  const Index rows = c.rows();
  const int cap = static_cast<int>(2 * rows + 10);

  std::vector<Index> sat;
  std::set<std::vector<Index>> visited{{}};
  Candidate best;
  std::optional<Vec> best_feasible_mu1;
  double best_feasible_err = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  MinErrorStep step;
  bool converged = false;

  while (true) {
    step = min_error_step(level, u_prev, P_prev, sat);
    if (!step.consistent) {
      status = SolveStatus::Degenerate;
      break;
    }

    Vec z = c * (step.A_tilde_pinv * level.b);
    for (Index row : sat) z(row) = 0.0;  // saturated rows are pinned by P_tilde
    const Vec r = c * step.mu1 - z;
    const ScalingRange range = get_range(z, r, d);

    // Rows that s cannot move must already hold; otherwise they are saturated first.
    std::optional<Index> stray;
    double stray_violation = 0.0;
    for (Index i = 0; i < rows; ++i) {
      if (std::abs(z(i)) >= kFlatRow || std::find(sat.begin(), sat.end(), i) != sat.end())
        continue;
      const double excess = r(i) - d(i);
      if (excess > feasibility_tol(d(i)) && excess > stray_violation) {
        stray = i;
        stray_violation = excess;
      }
    }

    const bool mu1_feasible = !stray && range.covers(1.0);
    if (mu1_feasible) {
      const double err = (level.A * step.mu1 - level.b).norm();
      if (!best_feasible_mu1 || err < best_feasible_err) {
        best_feasible_mu1 = step.mu1;
        best_feasible_err = err;
      }
    }

    if (backend != Backend::Hqp && !stray) {
      double s = 0.0;
      Vec mu2;
      double alpha = 0.0;
      if (backend == Backend::DirectionConstrained) {
        const AngleCandidate cand = min_angle_step(level, step.u_tilde, step.P_tilde, range);
        s = cand.s;
        mu2 = cand.mu2;
        alpha = cand.alpha;
      } else {
        s = clamp_range(1.0, range.s_min, range.s_max);
        mu2 = step.u_tilde + step.A_tilde_pinv * (s * level.b - level.A * step.u_tilde);
        alpha = angle(level.A * mu2, level.b);
      }
      // Points outside the raw range (guard fired) violate some row.
      if (range.covers(s) && improves(best, alpha, s)) {
        best.mu2 = std::move(mu2);
        best.alpha = alpha;
        best.s = s;
        best.valid = true;
      }
    }

    bool changed = false;
    if (!mu1_feasible) {
      std::optional<Index> add = stray;
      if (!add) {
        if (range.raw_max < 1.0) {
          add = range.critical_row;
        } else if (range.raw_min > 1.0) {
          add = range.lower_row;
        }
      }
      if (add && std::find(sat.begin(), sat.end(), *add) == sat.end()) {
        sat.push_back(*add);
        changed = true;
      } else {
        status = SolveStatus::Degenerate;
        break;
      }
    } else if (!sat.empty()) {
      const KktResult kkt = kkt_check(level, step.mu1, P_prev, rows_of(c, sat));
      if (kkt.remove_index) {
        sat.erase(sat.begin() + *kkt.remove_index);
        changed = true;
      }
    }

    if (!changed) {
      converged = true;
      break;
    }
    ++iterations;
    std::vector<Index> key = sat;
    std::sort(key.begin(), key.end());
    if (!visited.insert(std::move(key)).second || iterations > cap) {
      status = SolveStatus::IterationLimit;
      break;
    }
  }

  LevelResult out;
  LevelDiag& diag = out.diag;
  diag.iterations = iterations;
  diag.status = status;
  diag.saturated = sat;
  std::sort(diag.saturated.begin(), diag.saturated.end());

  Vec mu1;
  if (converged) {
    mu1 = step.mu1;
  } else {
    std::optional<Vec> start = best_feasible_mu1;
    if (!start && best.valid) start = best.mu2;
    ActiveSetResult polished = min_error_active_set(level, u_prev, P_prev, start);
    diag.fallback = true;
    diag.iterations += polished.iterations;
    if (polished.feasible) diag.status = polished.converged ? SolveStatus::Optimal : SolveStatus::IterationLimit;
    mu1 = std::move(polished.u);
  }
  if (!best.valid) {
    best.mu2 = mu1;
    best.alpha = angle(level.A * mu1, level.b);
    best.s = 1.0;
  }
  diag.mu1 = mu1;
  diag.mu2 = best.mu2;
  diag.s_star = best.s;
  diag.alpha_star = best.alpha;

  switch (backend) {
    case Backend::Hqp:
      out.u = mu1;
      diag.eta = 1.0;
      break;
    case Backend::Scaling:
      out.u = best.mu2;
      diag.eta = 0.0;
      break;
    case Backend::DirectionConstrained: {
      MergeResult merged = merge(mu1, best.mu2, level);
      out.u = std::move(merged.u);
      diag.eta = merged.eta;
      diag.mu2 = std::move(merged.mu2);
      break;
    }
  }
  const Vec task = level.A * out.u;
  diag.error_norm = (task - level.b).norm();
  diag.angle_dev = angle(task, level.b);
  return out;
}

}  // namespace

SolveOutcome solve(const Hierarchy& h, Backend backend) {
  h.validate();
  const Index n = h.dofs();
  Mat p = Mat::Identity(n, n);
  Vec u = Vec::Zero(n);

  SolveOutcome outcome;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const TaskLevel& src = h.levels()[k];
    TaskLevel level;
    level.A = src.A;
    level.b = src.b;
    level.theta = src.theta;
    std::tie(level.C, level.d) = h.stacked_inequalities(k);

    LevelResult result = solve_level(level, u, p, backend);
    outcome.iterations += result.diag.iterations;
    outcome.status = worse(outcome.status, result.diag.status);
    u = std::move(result.u);
    outcome.per_level.push_back(std::move(result.diag));

    const Mat ap = level.A * p;
    p = p - pinv(ap) * ap;
  }
  outcome.u = std::move(u);
  return outcome;
}

SolveOutcome dc_solve(const Hierarchy& h) { return solve(h, Backend::DirectionConstrained); }
SolveOutcome hqp_solve(const Hierarchy& h) { return solve(h, Backend::Hqp); }
SolveOutcome scaling_solve(const Hierarchy& h) { return solve(h, Backend::Scaling); }

}  // namespace dchier
