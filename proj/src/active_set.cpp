#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "dchier/solvers.hpp"

namespace dchier {

namespace {

struct LsiProblem {
  Mat M;  // objective ||M y - g||
  Vec g;
  Mat G;  // constraints G y <= h
  Vec h;
};

struct LsiOutcome {
  Vec y;
  int iterations = 0;
  bool converged = false;
};



// Primal active set from a feasible start. The working set only holds
// linearly independent rows.
LsiOutcome primal_active_set(const LsiProblem& p, Vec y, int cap) {
  const Index dim = p.M.cols();
  const Index rows = p.G.rows();
  std::vector<Index> work;
  LsiOutcome out;

  for (out.iterations = 0; out.iterations < cap; ++out.iterations) {
    Mat gw(static_cast<Index>(work.size()), dim);
    for (std::size_t i = 0; i < work.size(); ++i) gw.row(static_cast<Index>(i)) = p.G.row(work[i]);
    const Mat q = work.empty() ? Mat(Mat::Identity(dim, dim)) : null_projector(gw);
    const Vec resid = p.M * y - p.g;
    const Vec step = -pinv(p.M * q) * resid;

    if (step.norm() <= 1e-12 * (1.0 + y.norm())) {
      if (work.empty()) {
        out.converged = true;
        break;
      }
      const Vec lambda = -(pinv(gw.transpose()) * (p.M.transpose() * resid));
      Index arg = 0;
      for (Index i = 1; i < lambda.size(); ++i)
        if (lambda(i) < lambda(arg)) arg = i;
      const double tol = 1e-10 * std::max(1.0, (p.M.transpose() * resid).norm());
      if (lambda(arg) >= -tol) {
        out.converged = true;
        break;
      }
      work.erase(work.begin() + arg);
      continue;
    }

    double alpha = 1.0;
    std::optional<Index> block;
    for (Index i = 0; i < rows; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double rate = p.G.row(i).dot(step);
      if (rate <= 1e-14 * p.G.row(i).norm() * step.norm()) continue;
      const double a = std::max(0.0, (p.h(i) - p.G.row(i).dot(y)) / rate);
      if (a < alpha) {
        alpha = a;
        block = i;
      }
    }
    y += alpha * step;
    if (block) work.push_back(*block);
  }
  out.y = std::move(y);
  return out;
}

Mat range_basis(const Mat& projector) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (projector + projector.transpose()));
  std::vector<Index> keep;
  for (Index i = 0; i < projector.rows(); ++i)
    if (eig.eigenvalues()(i) > 0.5) keep.push_back(i);
  Mat basis(projector.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    basis.col(static_cast<Index>(j)) = eig.eigenvectors().col(keep[j]);
  return basis;
}

}  // namespace

ActiveSetResult min_error_active_set(const TaskLevel& level, const Vec& u_prev, const Mat& P_prev,
                                     const std::optional<Vec>& start) {
  const Index n = level.A.cols();
  if (u_prev.size() != n || P_prev.rows() != n || P_prev.cols() != n)
    throw InvalidInput("min_error_active_set: shape mismatch");

  const Mat basis = range_basis(P_prev);
  const Index dim = basis.cols();
  const Index rows = level.C.rows();
  LsiProblem p;
  p.M = level.A * basis;
  p.g = level.b - level.A * u_prev;
  p.G = level.C * basis;
  p.h = level.d - level.C * u_prev;
  const int cap = static_cast<int>(20 * (rows + dim) + 50);

  ActiveSetResult out;
  Vec y = Vec::Zero(dim);
  bool feasible_start = false;
  if (start) {
    y = basis.transpose() * (*start - u_prev);
    feasible_start = rows == 0 || ((p.G * y - p.h).array() <= 1e-9 * (1.0 + p.h.array().abs())).all();
  }

  if (!feasible_start && rows > 0) {
    // Phase one: minimise the largest violation t over (y, t).
    LsiProblem aux;
    aux.M = Mat::Zero(1, dim + 1);
    aux.M(0, dim) = 1.0;
    aux.g = Vec::Zero(1);
    aux.G = Mat::Zero(rows + 1, dim + 1);
    aux.G.topLeftCorner(rows, dim) = p.G;
    aux.G.col(dim).head(rows).setConstant(-1.0);
    aux.G(rows, dim) = -1.0;
    aux.h = Vec::Zero(rows + 1);
    aux.h.head(rows) = p.h;
    Vec w = Vec::Zero(dim + 1);
    w(dim) = std::max(0.0, (-p.h).maxCoeff());
    const LsiOutcome phase1 = primal_active_set(aux, w, cap);
    out.iterations += phase1.iterations;
    y = phase1.y.head(dim);
    if (phase1.y(dim) > 1e-9 * (1.0 + p.h.cwiseAbs().maxCoeff())) {
      out.u = u_prev + basis * y;
      out.feasible = false;
      return out;
    }
  }

  const LsiOutcome phase2 = primal_active_set(p, y, cap);
  out.iterations += phase2.iterations;
  out.converged = phase2.converged;
  out.u = u_prev + basis * phase2.y;
  out.feasible = true;

  return out;
}

}  // namespace dchier
