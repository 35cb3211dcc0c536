#include "sparselab/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparselab {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Covariance-form coordinate descent: keeps q = A^T (y - A w) current so each
// coordinate update costs O(p).
class CoordinateDescent {
 public:
  CoordinateDescent(const DesignMatrix& design, const Observation& obs)
      : gram_(gram(design)), aty_(design.columns().transpose() * obs.y), yty_(obs.y.squaredNorm()) {}

  LassoTrace solve(double lambda, const LassoConfig& config, Vector& w) const {
    const Index p = gram_.cols();
    LassoTrace trace;
    trace.lambda = lambda;
    Vector q = aty_ - gram_ * w;

    auto update = [&](Index j) {
      const double gjj = gram_(j, j);
      const double next = soft_threshold(q[j] + gjj * w[j], lambda) / gjj;
      const double delta = next - w[j];
      if (delta != 0.0) {
        q.noalias() -= delta * gram_.col(j);
        w[j] = next;
      }
      return std::abs(delta);
    };

    auto objective = [&] {
      // ||y - Aw||^2 = y^T y - w^T A^T y - w^T q
      const double rss = yty_ - w.dot(aty_) - w.dot(q);
      return 0.5 * std::max(rss, 0.0) + lambda * w.lpNorm<1>();
    };

    std::vector<Index> active;
    while (trace.sweeps < config.max_iter) {
      double change = 0.0;
      for (Index j = 0; j < p; ++j) change = std::max(change, update(j));
      ++trace.sweeps;
      trace.objective.push_back(objective());
      if (change < config.tol) {
        trace.converged = true;
        break;
      }
      // Iterate on the current active set until it settles, then re-scan
      // everything. The inner loop only touches the active block of the Gram.
      active.clear();
      for (Index j = 0; j < p; ++j)
        if (w[j] != 0.0) active.push_back(j);
      const Index n = static_cast<Index>(active.size());
      Matrix ga(n, n);
      Vector wa(n), qa(n), ya(n);
      for (Index c = 0; c < n; ++c) {
        const Index j = active[static_cast<std::size_t>(c)];
        wa[c] = w[j];
        qa[c] = q[j];
        ya[c] = aty_[j];
        for (Index r = 0; r < n; ++r) ga(r, c) = gram_(active[static_cast<std::size_t>(r)], j);
      }
      auto active_objective = [&] {
        const double rss = yty_ - wa.dot(ya) - wa.dot(qa);
        return 0.5 * std::max(rss, 0.0) + lambda * wa.lpNorm<1>();
      };
      for (int round = 0; trace.sweeps < config.max_iter; ++round) {
        double inner = 0.0;
        for (Index c = 0; c < n; ++c) {
          const double gcc = ga(c, c);
          const double next = soft_threshold(qa[c] + gcc * wa[c], lambda) / gcc;
          const double delta = next - wa[c];
          if (delta != 0.0) {
            qa.noalias() -= delta * ga.col(c);
            wa[c] = next;
            inner = std::max(inner, std::abs(delta));
          }
        }
        ++trace.sweeps;
        trace.objective.push_back(active_objective());
        if (inner < config.tol) break;
        if (round % 25 == 0 && jump_to_face_minimum(ga, ya, lambda, wa, qa, active_objective))
          trace.objective.push_back(active_objective());
      }
      for (Index c = 0; c < n; ++c) w[active[static_cast<std::size_t>(c)]] = wa[c];
      q = aty_ - gram_ * w;
    }
    return trace;
  }

 private:
  // Feature-sign step on the active block: solve the stationarity equations
  // with the current signs; if some coordinate would change sign, move along
  // the segment to the first zero crossing, drop that coordinate and repeat.
  // Every move stays in the closed orthant and heads towards the minimiser of
  // a convex quadratic that agrees with the objective there, so the objective
  // never increases.
  template <typename Objective>
  static bool jump_to_face_minimum(const Matrix& ga, const Vector& ya, double lambda, Vector& wa,
                                   Vector& qa, Objective&& objective) {
    const Index n = wa.size();
    if (n == 0) return false;
    const Vector saved = wa;
    const double before = objective();
    std::vector<Index> face;
    for (Index c = 0; c < n; ++c)
      if (wa[c] != 0.0) face.push_back(c);
    bool moved = false;
    while (!face.empty()) {
      const Index f = static_cast<Index>(face.size());
      Matrix g(f, f);
      Vector rhs(f);
      for (Index i = 0; i < f; ++i) {
        const Index c = face[static_cast<std::size_t>(i)];
        rhs[i] = ya[c] - lambda * (wa[c] > 0.0 ? 1.0 : -1.0);
        for (Index r = 0; r < f; ++r) g(r, i) = ga(face[static_cast<std::size_t>(r)], c);
      }
      Eigen::LLT<Matrix> llt(g);
      if (llt.info() != Eigen::Success) break;
      const Vector sol = llt.solve(rhs);
      if (!sol.allFinite()) break;
      double step = 1.0;
      Index blocking = -1;
      for (Index i = 0; i < f; ++i) {
        const double cur = wa[face[static_cast<std::size_t>(i)]];
        if (sol[i] * cur <= 0.0) {
          const double t = cur / (cur - sol[i]);
          if (t < step) {
            step = t;
            blocking = i;
          }
        }
      }
      for (Index i = 0; i < f; ++i) {
        double& v = wa[face[static_cast<std::size_t>(i)]];
        v += step * (sol[i] - v);
      }
      moved = true;
      if (blocking < 0) break;
      wa[face[static_cast<std::size_t>(blocking)]] = 0.0;
      face.erase(face.begin() + blocking);
    }
    if (!moved) return false;
    qa = ya - ga * wa;
    if (objective() <= before) return true;
    wa = saved;
    qa = ya - ga * wa;
    return false;
  }

  Matrix gram_;
  Vector aty_;
  double yty_;
};

Estimate make_estimate(Vector w, LassoTrace trace, double threshold) {
  Estimate est;
  est.support = support_of(w, threshold);
  est.coefficients = std::move(w);
  est.solver_tag = SolverTag::lasso;
  est.trace = std::move(trace);
  return est;
}

}  // namespace

void LassoConfig::validate() const {
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw std::invalid_argument("lambda grid must be positive");
    if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1]))
      throw std::invalid_argument("lambda grid must be strictly descending");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(support_threshold >= 0.0)) throw std::invalid_argument("support_threshold must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

std::vector<double> default_lambda_grid(const DesignMatrix& design, const Observation& obs,
                                        int points, double ratio) {
  const double lmax = (design.columns().transpose() * obs.y).cwiseAbs().maxCoeff();
  std::vector<double> grid;
  if (!(lmax > 0.0)) {
    grid.push_back(1.0);
    return grid;
  }
  if (points == 1) return {lmax};
  const double step = std::log(ratio) / (points - 1);
  for (int i = 0; i < points; ++i) grid.push_back(lmax * std::exp(step * i));
  return grid;
}

double lasso_objective(const DesignMatrix& design, const Observation& obs, const Vector& w,
                       double lambda) {
  return 0.5 * (obs.y - design.columns() * w).squaredNorm() + lambda * w.lpNorm<1>();
}

Estimate fit_lasso(const DesignMatrix& design, const Observation& obs, double lambda,
                   const LassoConfig& config) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  config.validate();
  CoordinateDescent cd(design, obs);
  Vector w = Vector::Zero(design.cols());
  LassoTrace trace = cd.solve(lambda, config, w);
  return make_estimate(std::move(w), std::move(trace), config.support_threshold);
}

std::vector<PathPoint> lasso_path(const DesignMatrix& design, const Observation& obs,
                                  const LassoConfig& config) {
  config.validate();
  const std::vector<double> grid =
      config.lambda_grid.empty() ? default_lambda_grid(design, obs) : config.lambda_grid;
  CoordinateDescent cd(design, obs);
  std::vector<PathPoint> path;
  path.reserve(grid.size());
  Vector w = Vector::Zero(design.cols());
  for (double lambda : grid) {
    LassoTrace trace = cd.solve(lambda, config, w);
    path.push_back({lambda, make_estimate(w, std::move(trace), config.support_threshold)});
  }
  return path;
}

bool path_recovers(const std::vector<PathPoint>& path, const Support& target) {
  return std::any_of(path.begin(), path.end(),
                     [&](const PathPoint& pt) { return pt.estimate.support == target; });
}

KktCheck lasso_kkt(const DesignMatrix& design, const Observation& obs, const Vector& w,
                   double lambda) {
  const Vector corr = design.columns().transpose() * (obs.y - design.columns() * w);
  KktCheck out;
  for (Index j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) {
      out.max_zero_violation = std::max(out.max_zero_violation, std::abs(corr[j]) - lambda);
    } else {
      const double target = w[j] > 0 ? lambda : -lambda;
      out.max_active_violation = std::max(out.max_active_violation, std::abs(corr[j] - target));
    }
  }
  return out;
}

}  // namespace sparselab
