#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparselab/design.hpp"
#include "sparselab/estimate.hpp"
#include "sparselab/lasso.hpp"
#include "sparselab/sbl.hpp"

namespace sparselab {

struct SolverSettings {
  LassoConfig lasso;  // empty lambda_grid -> default grid per trial
  int lasso_grid_points = 50;
  double lasso_grid_ratio = 1e-3;
  SblHyper sbl;  // noise_variance is replaced per cell by max(sigma, sigma_floor)^2
  double sigma_floor = 0.01;
  Index omp_steps = 0;  // 0 -> k of the cell's design
  bool run_lasso = true;
  bool run_omp = true;
  bool run_sbl = true;
};

struct ExperimentConfig {
  std::vector<DesignParams> design_params_grid;
  std::vector<double> sigma_grid;
  Index trials_per_cell = 1;
  double beta_min = 1.0;
  double magnitude_max = 1.0;
  SolverSettings solvers;
  Seed master_seed = 0;
  bool freeze_truth = false;  // one w* per cell instead of one per trial
  unsigned threads = 1;

  void validate() const;
};

struct SolverOutcome {
  SolverTag solver = SolverTag::lasso;
  bool exact_recovery = false;
  std::size_t hamming_distance = 0;
  double runtime_ms = 0.0;  // wall clock; not part of the reproducible outputs
  bool failed = false;
  std::string error;
};

struct TrialReport {
  std::size_t cell_id = 0;
  Index trial = 0;
  Seed truth_seed = 0;
  Seed noise_seed = 0;
  std::vector<SolverOutcome> outcomes;
  bool omp_first_step_misselection = false;
  double ic_value = 0.0;  // for this trial's sign pattern
  // solver certificates
  bool lasso_kkt_ok = true;
  double lasso_kkt_worst = 0.0;
  bool omp_orthogonal_ok = true;
  double omp_orthogonality_worst = 0.0;
  bool sbl_descent_ok = true;
};

struct SolverSummary {
  SolverTag solver = SolverTag::lasso;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double recovery_rate = 0.0;
  double se = 0.0;
  double mean_hamming = 0.0;
};

struct CellSummary {
  std::size_t cell_id = 0;
  DesignParams design;
  double sigma = 0.0;
  std::size_t trials = 0;
  std::vector<SolverSummary> solvers;
  double omp_misselect_rate = 0.0;
  double omp_misselect_se = 0.0;
  double ic_value = 0.0;  // worst case over sign patterns for the cell's design
  double kappa = 0.0;
};

struct ExperimentReport {
  std::vector<TrialReport> trials;
  std::vector<CellSummary> cells;
};

/// One cell per (design params, sigma) pair, design-major. Designs are built
/// once per design-grid entry and shared by that entry's sigma cells and
/// trials. Per-trial seeds are derived from (master_seed, cell, trial), so
/// results do not depend on `threads`.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Groups trial reports by cell_id. Throws EmptyCell if `cell_meta` names a
/// cell with no trials.
std::vector<CellSummary> summarize(const std::vector<TrialReport>& reports,
                                   const std::vector<CellSummary>& cell_meta);

/// Mean of 0/1 outcomes with normal-approximation standard error.
/// Throws EmptyCell on empty input.
std::pair<double, double> binomial_rate(const std::vector<bool>& outcomes);

/// Exact Gaussian probability that a near-duplicate beats its true column in
/// signed correlation at the first pursuit step: T_j - T_l ~ N(beta (1 - rho),
/// 2 sigma^2 (1 - rho)).
double misselection_probability(double beta, double rho, double sigma);

/// Same event for absolute correlations |T_l| > |T_j| on a two-column design.
double misselection_probability_abs(double beta, double rho, double sigma);

std::string cells_csv(const std::vector<CellSummary>& cells);
std::string summary_json(const ExperimentConfig& config, const std::vector<CellSummary>& cells);
std::string trials_jsonl(const std::vector<TrialReport>& trials);
std::string timing_csv(const std::vector<TrialReport>& trials);

/// Writes cells.csv, summary.json, trials.jsonl and timing.csv into `dir`.
void write_report(const ExperimentConfig& config, const ExperimentReport& report,
                  const std::string& dir);

}  // namespace sparselab
