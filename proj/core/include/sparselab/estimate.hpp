#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "sparselab/types.hpp"

namespace sparselab {

enum class SolverTag { lasso, omp, sbl, oracle };

std::string_view to_string(SolverTag tag) noexcept;
SolverTag solver_tag_from_string(std::string_view name);

struct LassoTrace {
  double lambda = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> objective;  // after each full sweep
};

struct OmpStep {
  Index selected = -1;
  Vector correlations;  // |<a_j, r>| before the selection, all j
  double residual_norm = 0.0;  // after the refit
};

struct OmpTrace {
  std::vector<OmpStep> steps;
  bool first_step_misselection = false;
};

struct SblTrace {
  std::vector<double> objective;  // total objective after every accepted update
  int iterations = 0;
  bool converged = false;
  int restarts_run = 0;
  int refinement_moves = 0;
  Support pinned;
  double noise_variance = 0.0;
};

struct OracleTrace {
  double residual_norm = 0.0;
  std::size_t subsets = 0;
};

using SolverTrace = std::variant<std::monostate, LassoTrace, OmpTrace, SblTrace, OracleTrace>;

struct Estimate {
  Vector coefficients;
  Support support;
  SolverTag solver_tag = SolverTag::lasso;
  SolverTrace trace;
};

/// Ascending indices with |w_j| > threshold.
Support support_of(const Vector& w, double threshold);

/// Size of the symmetric difference of two ascending supports.
std::size_t hamming_distance(const Support& a, const Support& b);

}  // namespace sparselab
