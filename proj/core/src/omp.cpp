#include "sparselab/omp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sparselab/errors.hpp"

namespace sparselab {

Estimate fit_omp(const DesignMatrix& design, const Observation& obs, Index steps) {
  const Matrix& A = design.columns();
  const Index m = A.rows(), p = A.cols();
  if (steps < 1 || steps > std::min(m, p))
    throw std::invalid_argument("OMP steps must lie in [1, min(m, p)], got " +
                                std::to_string(steps));

  Matrix Q(m, steps);
  Matrix R = Matrix::Zero(steps, steps);
  std::vector<bool> taken(static_cast<std::size_t>(p), false);
  Support order;
  OmpTrace trace;
  Vector r = obs.y;

  for (Index t = 0; t < steps; ++t) {
    OmpStep step;
    step.correlations = (A.transpose() * r).cwiseAbs();
    Index pick = -1;
    double best = -1.0;
    for (Index j = 0; j < p; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      if (step.correlations[j] > best) {
        best = step.correlations[j];
        pick = j;
      }
    }

    // Classical Gram-Schmidt with one reorthogonalisation pass.
    Vector v = A.col(pick);
    Vector coef = Vector::Zero(t);
    for (int pass = 0; pass < 2 && t > 0; ++pass) {
      const Vector c = Q.leftCols(t).transpose() * v;
      v.noalias() -= Q.leftCols(t) * c;
      coef += c;
    }
    const double diag = v.norm();
    R.col(t).head(t) = coef;
    R(t, t) = diag;
    const Eigen::ArrayXd d = R.diagonal().head(t + 1).cwiseAbs().array();
    if (!(diag > 0.0) || d.maxCoeff() > kOmpConditionLimit * d.minCoeff())
      throw SingularLeastSquares("OMP step " + std::to_string(t + 1) + " selected column " +
                                 std::to_string(pick) + " dependent on earlier picks");
    Q.col(t) = v / diag;

    taken[static_cast<std::size_t>(pick)] = true;
    order.push_back(pick);
    const auto qt = Q.leftCols(t + 1);
    r = obs.y - qt * (qt.transpose() * obs.y);
    step.selected = pick;
    step.residual_norm = r.norm();
    trace.steps.push_back(std::move(step));
  }

  const Vector rhs = Q.transpose() * obs.y;
  const Vector c = R.triangularView<Eigen::Upper>().solve(rhs);

  Estimate est;
  est.coefficients = Vector::Zero(p);
  for (Index i = 0; i < steps; ++i) est.coefficients[order[i]] = c[i];
  est.support = order;
  std::sort(est.support.begin(), est.support.end());
  const Support& truth = design.true_support();
  trace.first_step_misselection =
      !std::binary_search(truth.begin(), truth.end(), trace.steps.front().selected);
  est.solver_tag = SolverTag::omp;
  est.trace = std::move(trace);
  return est;
}

}  // namespace sparselab
