#include "sparselab/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sparselab/diagnostics.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/instance.hpp"
#include "sparselab/omp.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/serialize.hpp"

namespace sparselab {

namespace {

constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kDesignStream = 3;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct Cell {
  std::size_t id;
  std::size_t design_index;
  double sigma;
};

template <typename F>
double timed_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

TrialReport run_trial(const ExperimentConfig& cfg, const DesignMatrix& design, const Cell& cell,
                      Index trial) {
  TrialReport rep;
  rep.cell_id = cell.id;
  rep.trial = trial;
  rep.truth_seed = derive_seed(cfg.master_seed,
                               {cell.id, static_cast<std::uint64_t>(cfg.freeze_truth ? 0 : trial),
                                kTruthStream});
  rep.noise_seed =
      derive_seed(cfg.master_seed, {cell.id, static_cast<std::uint64_t>(trial), kNoiseStream});

  const GroundTruth truth =
      sample_ground_truth(design, cfg.beta_min, cfg.magnitude_max, rep.truth_seed);
  const Observation obs = observe(design, truth, cell.sigma, rep.noise_seed);
  const Support& target = design.true_support();
  try {
    rep.ic_value = irrepresentable_value(design, truth.sign_pattern);
  } catch (const SingularSupportGram&) {
    rep.ic_value = std::numeric_limits<double>::quiet_NaN();
  }

  auto record = [&](SolverTag tag, auto&& body) {
    SolverOutcome out;
    out.solver = tag;
    try {
      Support found;
      out.runtime_ms = timed_ms([&] { found = body(); });
      out.exact_recovery = found == target;
      out.hamming_distance = hamming_distance(found, target);
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
      out.exact_recovery = false;
      out.hamming_distance = target.size();
    }
    rep.outcomes.push_back(std::move(out));
  };

  const auto& s = cfg.solvers;
  if (s.run_lasso) {
    record(SolverTag::lasso, [&]() -> Support {
      LassoConfig lc = s.lasso;
      if (lc.lambda_grid.empty())
        lc.lambda_grid = default_lambda_grid(design, obs, s.lasso_grid_points, s.lasso_grid_ratio);
      const auto path = lasso_path(design, obs, lc);
      for (const auto& pt : path) {
        const KktCheck kkt = lasso_kkt(design, obs, pt.estimate.coefficients, pt.lambda);
        const double worst = std::max(kkt.max_zero_violation, kkt.max_active_violation);
        rep.lasso_kkt_worst = std::max(rep.lasso_kkt_worst, worst);
        if (!kkt.ok(10.0 * lc.tol)) rep.lasso_kkt_ok = false;
      }
      // Best case over the grid: report the recovering point if any, else the
      // point closest to the target.
      const PathPoint* best = &path.front();
      for (const auto& pt : path) {
        if (pt.estimate.support == target) return target;
        if (hamming_distance(pt.estimate.support, target) <
            hamming_distance(best->estimate.support, target))
          best = &pt;
      }
      return best->estimate.support;
    });
  }
  if (s.run_omp) {
    record(SolverTag::omp, [&]() -> Support {
      const Index steps = s.omp_steps > 0 ? s.omp_steps : design.params().k;
      const Estimate est = fit_omp(design, obs, steps);
      const auto& trace = std::get<OmpTrace>(est.trace);
      rep.omp_first_step_misselection = trace.first_step_misselection;
      const Vector r = obs.y - design.columns() * est.coefficients;
      for (Index j : est.support) {
        const double dot = std::abs(design.columns().col(j).dot(r));
        rep.omp_orthogonality_worst = std::max(rep.omp_orthogonality_worst, dot);
        if (dot > 1e-8) rep.omp_orthogonal_ok = false;
      }
      return est.support;
    });
  }
  if (s.run_sbl) {
    record(SolverTag::sbl, [&]() -> Support {
      SblHyper h = s.sbl;
      const double sd = std::max(cell.sigma, s.sigma_floor);
      h.noise_variance = sd * sd;
      h.restart_seed = derive_seed(rep.noise_seed, {0x5b1});
      const Estimate est = fit_sbl(design, obs, h);
      const auto& obj = std::get<SblTrace>(est.trace).objective;
      for (std::size_t i = 1; i < obj.size(); ++i)
        if (obj[i] > obj[i - 1] + 1e-10) rep.sbl_descent_ok = false;
      return est.support;
    });
  }
  return rep;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (design_params_grid.empty()) throw std::invalid_argument("design_params_grid is empty");
  if (sigma_grid.empty()) throw std::invalid_argument("sigma_grid is empty");
  if (trials_per_cell < 1) throw std::invalid_argument("trials_per_cell must be >= 1");
  if (!(beta_min > 0.0 && beta_min <= magnitude_max))
    throw std::invalid_argument("need 0 < beta_min <= magnitude_max");
  for (double s : sigma_grid)
    if (!(s >= 0.0)) throw std::invalid_argument("sigma values must be nonnegative");
  for (const auto& p : design_params_grid) p.validate();
  solvers.lasso.validate();
  SblHyper h = solvers.sbl;
  h.noise_variance = 1.0;
  h.validate();
  if (!(solvers.sigma_floor > 0.0)) throw std::invalid_argument("sigma_floor must be positive");
}

std::pair<double, double> binomial_rate(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) throw EmptyCell("no outcomes to aggregate");
  double hits = 0.0;
  for (bool b : outcomes) hits += b ? 1.0 : 0.0;
  const double n = static_cast<double>(outcomes.size());
  const double rate = hits / n;
  return {rate, std::sqrt(rate * (1.0 - rate) / n)};
}

double misselection_probability(double beta, double rho, double sigma) {
  const double mean = beta * (1.0 - rho);
  const double sd = sigma * std::sqrt(2.0 * (1.0 - rho));
  return normal_cdf(-mean / sd);
}

double misselection_probability_abs(double beta, double rho, double sigma) {
  // D = T_j - T_l and S = T_j + T_l are independent Gaussians (equal variances),
  // and |T_l| > |T_j| iff D * S < 0.
  const double pd = misselection_probability(beta, rho, sigma);
  const double ps = normal_cdf(-beta * (1.0 + rho) / (sigma * std::sqrt(2.0 * (1.0 + rho))));
  return pd * (1.0 - ps) + (1.0 - pd) * ps;
}

std::vector<CellSummary> summarize(const std::vector<TrialReport>& reports,
                                   const std::vector<CellSummary>& cell_meta) {
  std::map<std::size_t, std::vector<const TrialReport*>> by_cell;
  for (const auto& r : reports) by_cell[r.cell_id].push_back(&r);

  std::vector<CellSummary> out;
  for (const auto& meta : cell_meta) {
    auto it = by_cell.find(meta.cell_id);
    if (it == by_cell.end() || it->second.empty())
      throw EmptyCell("cell " + std::to_string(meta.cell_id) + " has no trials");
    const auto& trials = it->second;
    CellSummary cs = meta;
    cs.trials = trials.size();
    cs.solvers.clear();

    std::map<SolverTag, std::vector<const SolverOutcome*>> per_solver;
    for (const auto* t : trials)
      for (const auto& o : t->outcomes) per_solver[o.solver].push_back(&o);
    for (const auto& [tag, outs] : per_solver) {
      SolverSummary ss;
      ss.solver = tag;
      ss.trials = outs.size();
      std::vector<bool> hits;
      double ham = 0.0;
      for (const auto* o : outs) {
        hits.push_back(o->exact_recovery);
        ham += static_cast<double>(o->hamming_distance);
        if (o->failed) ++ss.failures;
      }
      std::tie(ss.recovery_rate, ss.se) = binomial_rate(hits);
      ss.mean_hamming = ham / static_cast<double>(outs.size());
      cs.solvers.push_back(ss);
    }
    if (per_solver.count(SolverTag::omp)) {
      std::vector<bool> mis;
      for (const auto* t : trials) mis.push_back(t->omp_first_step_misselection);
      std::tie(cs.omp_misselect_rate, cs.omp_misselect_se) = binomial_rate(mis);
    }
    out.push_back(std::move(cs));
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();

  std::vector<DesignMatrix> designs;
  designs.reserve(config.design_params_grid.size());
  for (std::size_t d = 0; d < config.design_params_grid.size(); ++d) {
    DesignParams params = config.design_params_grid[d];
    params.seed = derive_seed(config.master_seed, {d, params.seed, kDesignStream});
    designs.push_back(build_design(params));
  }

  std::vector<Cell> cells;
  std::vector<CellSummary> meta;
  for (std::size_t d = 0; d < designs.size(); ++d) {
    double ic = std::numeric_limits<double>::quiet_NaN();
    try {
      ic = worst_case_irrepresentable(designs[d]);
    } catch (const SingularSupportGram&) {
    }
    const double kappa = restricted_eigenvalue(designs[d]);
    for (double sigma : config.sigma_grid) {
      const std::size_t id = cells.size();
      cells.push_back({id, d, sigma});
      CellSummary cs;
      cs.cell_id = id;
      cs.design = designs[d].params();
      cs.sigma = sigma;
      cs.ic_value = ic;
      cs.kappa = kappa;
      meta.push_back(cs);
    }
  }

  const std::size_t per_cell = static_cast<std::size_t>(config.trials_per_cell);
  const std::size_t total = cells.size() * per_cell;
  std::vector<TrialReport> trials(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const Cell& cell = cells[i / per_cell];
      trials[i] = run_trial(config, designs[cell.design_index], cell,
                            static_cast<Index>(i % per_cell));
    }
  };
  const unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentReport report;
  report.cells = summarize(trials, meta);
  report.trials = std::move(trials);
  return report;
}

std::string cells_csv(const std::vector<CellSummary>& cells) {
  std::ostringstream os;
  os << "cell_id,solver,rho_in,sigma,m,p,k,recovery_rate,se,mean_hamming,omp_misselect_rate,"
        "ic_value\n";
  for (const auto& c : cells)
    for (const auto& s : c.solvers)
      os << c.cell_id << ',' << to_string(s.solver) << ',' << num(c.design.rho_in) << ','
         << num(c.sigma) << ',' << c.design.m << ',' << c.design.p << ',' << c.design.k << ','
         << num(s.recovery_rate) << ',' << num(s.se) << ',' << num(s.mean_hamming) << ','
         << num(c.omp_misselect_rate) << ',' << num(c.ic_value) << '\n';
  return os.str();
}

std::string summary_json(const ExperimentConfig& config, const std::vector<CellSummary>& cells) {
  nlohmann::json j;
  j["config"] = to_json(config);
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(to_json(c));
  return j.dump(2) + "\n";
}

std::string trials_jsonl(const std::vector<TrialReport>& trials) {
  std::string out;
  for (const auto& t : trials) out += to_json(t).dump() + "\n";
  return out;
}

std::string timing_csv(const std::vector<TrialReport>& trials) {
  std::ostringstream os;
  os << "cell_id,trial,solver,runtime_ms\n";
  for (const auto& t : trials)
    for (const auto& o : t.outcomes)
      os << t.cell_id << ',' << t.trial << ',' << to_string(o.solver) << ',' << num(o.runtime_ms)
         << '\n';
  return os.str();
}

void write_report(const ExperimentConfig& config, const ExperimentReport& report,
                  const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name + " in " + dir);
    f << body;
  };
  write("cells.csv", cells_csv(report.cells));
  write("summary.json", summary_json(config, report.cells));
  write("trials.jsonl", trials_jsonl(report.trials));
  write("timing.csv", timing_csv(report.trials));
}

}  // namespace sparselab
