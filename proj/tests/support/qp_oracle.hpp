#pragma once

// Brute-force lexicographic least-squares oracle. Every subset of inequality
// rows is tried as an equality set; each subproblem is solved with
// QR-based factorizations so nothing here shares the SVD path the solvers use.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dchier/hierarchy.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LexResult {
  std::vector<double> objectives;  // ||A_k u - b_k|| per level
  VectorXd u;
  bool feasible = true;
};

inline MatrixXd null_basis(const MatrixXd& e, Eigen::Index n) {
  if (e.rows() == 0) return MatrixXd::Identity(n, n);
  Eigen::FullPivHouseholderQR<MatrixXd> qr(e.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const MatrixXd q = qr.matrixQ();
  return q.rightCols(n - rank);
}

// Minimises ||A u - b|| over {E u = e}; nullopt when E u = e is inconsistent.
inline std::optional<VectorXd> constrained_lsq(const MatrixXd& a, const VectorXd& b,
                                                const MatrixXd& e, const VectorXd& rhs) {
  const Eigen::Index n = a.cols();
  VectorXd up = VectorXd::Zero(n);
  if (e.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(e);
    cod.setThreshold(1e-10);
    up = cod.solve(rhs);
    if ((e * up - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()))
      return std::nullopt;
  }
  const MatrixXd nb = null_basis(e, n);
  if (nb.cols() == 0) return up;
  const MatrixXd an = a * nb;
  // A task fully absorbed by E leaves only round-off in A * N.
  if (an.norm() < 1e-9) return up;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(an);
  cod.setThreshold(1e-10);
  const VectorXd y = cod.solve(b - a * up);
  return VectorXd(up + nb * y);
}

inline LexResult lexicographic_qp(const dchier::Hierarchy& h) {
  const Eigen::Index n = h.dofs();
  LexResult out;
  out.u = VectorXd::Zero(n);
  MatrixXd fixed_a(0, n);
  VectorXd fixed_v(0);

  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& level = h.levels()[k];
    const auto [c, d] = h.stacked_inequalities(k);
    const Eigen::Index rows = c.rows();

    std::optional<VectorXd> best;
    double best_obj = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << rows); ++mask) {
      const int count = __builtin_popcount(mask);
      MatrixXd e(fixed_a.rows() + count, n);
      VectorXd rhs(fixed_a.rows() + count);
      e.topRows(fixed_a.rows()) = fixed_a;
      rhs.head(fixed_a.rows()) = fixed_v;
      Eigen::Index at = fixed_a.rows();
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (mask & (1u << i)) {
          e.row(at) = c.row(i);
          rhs(at) = d(i);
          ++at;
        }
      }
      const auto u = constrained_lsq(level.A, level.b, e, rhs);
      if (!u) continue;
      bool ok = true;
      for (Eigen::Index i = 0; i < rows && ok; ++i)
        ok = c.row(i).dot(*u) <= d(i) + 1e-8 * (1.0 + std::abs(d(i)));
      if (!ok) continue;
      const double obj = (level.A * *u - level.b).norm();
      if (!best || obj < best_obj - 1e-12) {
        best = *u;
        best_obj = obj;
      }
    }
    if (!best) {
      out.feasible = false;
      return out;
    }
    out.objectives.push_back(best_obj);
    out.u = *best;

    MatrixXd grown(fixed_a.rows() + level.A.rows(), n);
    VectorXd grown_v(fixed_a.rows() + level.A.rows());
    grown.topRows(fixed_a.rows()) = fixed_a;
    grown.bottomRows(level.A.rows()) = level.A;
    grown_v.head(fixed_a.rows()) = fixed_v;
    grown_v.tail(level.A.rows()) = level.A * out.u;
    fixed_a = std::move(grown);
    fixed_v = std::move(grown_v);
  }
  return out;
}

}  // namespace oracle
