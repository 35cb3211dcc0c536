#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sparselab/bench.hpp"
#include "sparselab/diagnostics.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/lasso.hpp"
#include "sparselab/omp.hpp"
#include "sparselab/oracle.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/sbl.hpp"
#include "sparselab/serialize.hpp"

using namespace sparselab;

namespace {

std::vector<int> parse_signs(const std::string& text) {
  std::vector<int> out;
  for (char c : text) {
    if (c == '+') out.push_back(1);
    else if (c == '-') out.push_back(-1);
    else throw std::invalid_argument("--signs takes a string of '+' and '-'");
  }
  return out;
}

struct Loaded {
  DesignMatrix design;
  GroundTruth truth;
  Observation obs;
};

Loaded load(const std::string& design_path, const std::string& instance_path) {
  DesignMatrix d = design_from_json(read_json_file(design_path));
  auto [t, o] = instance_from_json(read_json_file(instance_path));
  if (o.y.size() != d.rows() || t.w_star.size() != d.cols())
    throw ParseError("instance dimensions do not match the design");
  return {std::move(d), std::move(t), std::move(o)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse support recovery lab"};
  app.require_subcommand(1);

  // design
  DesignParams dp;
  std::string design_out;
  auto* design_cmd = app.add_subcommand("design", "build a near-duplicate design matrix");
  design_cmd->add_option("--m", dp.m, "rows")->required();
  design_cmd->add_option("--p", dp.p, "columns")->required();
  design_cmd->add_option("--k", dp.k, "support size")->required();
  design_cmd->add_option("--group-size", dp.group_size, "near-duplicates per true column")
      ->capture_default_str();
  design_cmd->add_option("--rho-in", dp.rho_in)->capture_default_str();
  design_cmd->add_option("--rho-out-max", dp.rho_out_max)->capture_default_str();
  design_cmd->add_option("--gamma", dp.support_gram_offdiag, "support Gram off-diagonal")
      ->capture_default_str();
  design_cmd->add_option("--tilt", dp.duplicate_tilt,
                         "fraction of each duplicate's residual direction aimed at another "
                         "true column")
      ->capture_default_str();
  design_cmd->add_option("--seed", dp.seed)->capture_default_str();
  design_cmd->add_option("--out", design_out)->required();

  // instance
  std::string inst_design, inst_out;
  double beta_min = 1.0, mag_max = 1.0, sigma = 0.0;
  Seed inst_seed = 0;
  auto* inst_cmd = app.add_subcommand("instance", "sample w* and a noisy observation");
  inst_cmd->add_option("--design", inst_design)->required()->check(CLI::ExistingFile);
  inst_cmd->add_option("--beta-min", beta_min)->capture_default_str();
  inst_cmd->add_option("--mag-max", mag_max)->capture_default_str();
  inst_cmd->add_option("--sigma", sigma)->capture_default_str();
  inst_cmd->add_option("--seed", inst_seed)->capture_default_str();
  inst_cmd->add_option("--out", inst_out)->required();

  // ic
  std::string ic_design, ic_signs, ic_out;
  bool worst_case = false;
  auto* ic_cmd = app.add_subcommand("ic", "irrepresentable condition and coherence report");
  ic_cmd->add_option("--design", ic_design)->required()->check(CLI::ExistingFile);
  auto* signs_opt = ic_cmd->add_option("--signs", ic_signs, "e.g. +-+ (default all +)");
  ic_cmd->add_flag("--worst-case", worst_case, "maximise over all sign patterns")
      ->excludes(signs_opt);
  ic_cmd->add_option("--out", ic_out)->required();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run one solver on an instance");
  solve_cmd->require_subcommand(1);
  std::string s_design, s_inst, s_out;
  auto common = [&](CLI::App* c) {
    c->add_option("--design", s_design)->required()->check(CLI::ExistingFile);
    c->add_option("--instance", s_inst)->required()->check(CLI::ExistingFile);
    c->add_option("--out", s_out)->required();
  };

  double lambda = 0.0;
  bool path = false;
  auto* lasso_cmd = solve_cmd->add_subcommand("lasso", "coordinate-descent LASSO");
  common(lasso_cmd);
  auto* lambda_opt = lasso_cmd->add_option("--lambda", lambda)->check(CLI::PositiveNumber);
  auto* path_opt = lasso_cmd->add_flag("--path", path, "default 50-point path");
  lambda_opt->excludes(path_opt);

  Index omp_k = 0;
  auto* omp_cmd = solve_cmd->add_subcommand("omp", "k-step orthogonal matching pursuit");
  common(omp_cmd);
  omp_cmd->add_option("--k", omp_k)->required();

  SblHyper hyper;
  double sbl_sigma = 1.0;
  auto* sbl_cmd = solve_cmd->add_subcommand("sbl", "SBL joint MAP");
  common(sbl_cmd);
  sbl_cmd->add_option("--a", hyper.a)->capture_default_str();
  sbl_cmd->add_option("--b", hyper.b)->capture_default_str();
  sbl_cmd->add_option("--sigma", sbl_sigma, "noise standard deviation")->required();
  sbl_cmd->add_flag("--estimate-sigma", hyper.estimate_noise);
  sbl_cmd->add_option("--restarts", hyper.restarts)->capture_default_str();
  sbl_cmd->add_option("--restart-seed", hyper.restart_seed)->capture_default_str();

  // oracle
  std::string o_design, o_inst, o_out;
  Index o_k = 0;
  bool full_table = false;
  unsigned o_threads = 1;
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive best-subset least squares");
  oracle_cmd->add_option("--design", o_design)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--instance", o_inst)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--k", o_k)->required();
  oracle_cmd->add_option("--out", o_out)->required();
  oracle_cmd->add_flag("--full-table", full_table);
  oracle_cmd->add_option("--threads", o_threads)->capture_default_str();

  // bench
  std::string config_path, out_dir;
  int bench_threads = -1;
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo recovery experiment");
  bench_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out-dir", out_dir)->required();
  bench_cmd->add_option("--threads", bench_threads, "override the config's thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*design_cmd) {
      write_json_file(design_out, to_json(build_design(dp)));
    } else if (*inst_cmd) {
      const DesignMatrix d = design_from_json(read_json_file(inst_design));
      if (sigma < 0.0) throw std::invalid_argument("--sigma must be nonnegative");
      const GroundTruth t = sample_ground_truth(d, beta_min, mag_max, derive_seed(inst_seed, {1}));
      const Observation o = observe(d, t, sigma, derive_seed(inst_seed, {2}));
      write_json_file(inst_out, to_json(t, o));
    } else if (*ic_cmd) {
      const DesignMatrix d = design_from_json(read_json_file(ic_design));
      CoherenceReport r;
      if (worst_case) {
        r = worst_case_report(d);
      } else {
        std::vector<int> signs = ic_signs.empty()
                                     ? std::vector<int>(static_cast<std::size_t>(d.true_support().size()), 1)
                                     : parse_signs(ic_signs);
        r = coherence_report(d, signs);
      }
      write_json_file(ic_out, to_json(r));
    } else if (*solve_cmd) {
      const Loaded in = load(s_design, s_inst);
      if (*lasso_cmd) {
        if (!path && lambda_opt->count() == 0)
          throw std::invalid_argument("solve lasso needs --lambda or --path");
        LassoConfig cfg;
        if (path) {
          cfg.lambda_grid = default_lambda_grid(in.design, in.obs);
          const auto pts = lasso_path(in.design, in.obs, cfg);
          Json arr = Json::array();
          for (const auto& pt : pts) arr.push_back({{"lambda", pt.lambda}, {"estimate", to_json(pt.estimate)}});
          write_json_file(s_out, {{"path", arr},
                                  {"recovers", path_recovers(pts, in.design.true_support())}});
        } else {
          write_json_file(s_out, to_json(fit_lasso(in.design, in.obs, lambda, cfg)));
        }
      } else if (*omp_cmd) {
        write_json_file(s_out, to_json(fit_omp(in.design, in.obs, omp_k)));
      } else if (*sbl_cmd) {
        hyper.noise_variance = sbl_sigma * sbl_sigma;
        write_json_file(s_out, to_json(fit_sbl(in.design, in.obs, hyper)));
      }
    } else if (*oracle_cmd) {
      const Loaded in = load(o_design, o_inst);
      write_json_file(o_out, to_json(best_subset(in.design, in.obs, o_k, full_table, o_threads)));
    } else if (*bench_cmd) {
      ExperimentConfig cfg = experiment_config_from_json(read_json_file(config_path));
      if (bench_threads > 0) cfg.threads = static_cast<unsigned>(bench_threads);
      const ExperimentReport rep = run_experiment(cfg);
      write_report(cfg, rep, out_dir);
      std::cout << cells_csv(rep.cells);
    }
  } catch (const std::exception& e) {
    std::cerr << "lab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
