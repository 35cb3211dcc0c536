#pragma once

#include <vector>

#include "sparselab/design.hpp"
#include "sparselab/estimate.hpp"
#include "sparselab/instance.hpp"

namespace sparselab {

struct LassoConfig {
  std::vector<double> lambda_grid;  // strictly descending; empty selects the default grid
  int max_iter = 100000;            // full sweeps per lambda
  double tol = 1e-10;               // max |coordinate change| at convergence
  double support_threshold = 1e-6;

  void validate() const;
};

/// `points` log-spaced values from lambda_max = ||A^T y||_inf down to
/// ratio * lambda_max.
std::vector<double> default_lambda_grid(const DesignMatrix& design, const Observation& obs,
                                        int points = 50, double ratio = 1e-3);

/// (1/2) ||y - A w||^2 + lambda ||w||_1
double lasso_objective(const DesignMatrix& design, const Observation& obs, const Vector& w,
                       double lambda);

/// Cyclic coordinate descent with soft-thresholding, ascending index order.
/// Hitting max_iter leaves trace.converged = false; it is not an error.
Estimate fit_lasso(const DesignMatrix& design, const Observation& obs, double lambda,
                   const LassoConfig& config);

struct PathPoint {
  double lambda = 0.0;
  Estimate estimate;
};

/// One warm-started fit per grid point.
std::vector<PathPoint> lasso_path(const DesignMatrix& design, const Observation& obs,
                                  const LassoConfig& config);

/// True iff some grid point recovers `target` exactly.
bool path_recovers(const std::vector<PathPoint>& path, const Support& target);

struct KktCheck {
  double max_zero_violation = 0.0;    // max(|a_j^T r| - lambda, 0) over w_j = 0
  double max_active_violation = 0.0;  // max |a_j^T r - lambda sign(w_j)| over w_j != 0
  bool ok(double slack) const {
    return max_zero_violation <= slack && max_active_violation <= slack;
  }
};

KktCheck lasso_kkt(const DesignMatrix& design, const Observation& obs, const Vector& w,
                   double lambda);

}  // namespace sparselab
