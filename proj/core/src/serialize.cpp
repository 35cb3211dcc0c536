#include "sparselab/serialize.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

// NaN has no JSON literal and is written as null.
Json number(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

Json vec(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vec_from(const Json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(xs.data(), static_cast<Index>(xs.size()));
}

Support support_from(const Json& j) { return j.get<Support>(); }

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ParseError(std::string(what) + ": unknown key '" + k + "'");
}

template <typename T>
void read_opt(const Json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

Json to_json(const DesignParams& p) {
  return {{"m", p.m},
          {"p", p.p},
          {"k", p.k},
          {"group_size", p.group_size},
          {"rho_in", p.rho_in},
          {"rho_out_max", p.rho_out_max},
          {"support_gram_offdiag", p.support_gram_offdiag},
          {"duplicate_tilt", p.duplicate_tilt},
          {"seed", p.seed}};
}

DesignParams design_params_from_json(const Json& j) {
  return guarded("design params", [&] {
    reject_unknown(j,
                   {"m", "p", "k", "group_size", "rho_in", "rho_out_max", "support_gram_offdiag",
                    "duplicate_tilt", "seed"},
                   "design params");
    DesignParams p;
    read_opt(j, "m", p.m);
    read_opt(j, "p", p.p);
    read_opt(j, "k", p.k);
    read_opt(j, "group_size", p.group_size);
    read_opt(j, "rho_in", p.rho_in);
    read_opt(j, "rho_out_max", p.rho_out_max);
    read_opt(j, "support_gram_offdiag", p.support_gram_offdiag);
    read_opt(j, "duplicate_tilt", p.duplicate_tilt);
    read_opt(j, "seed", p.seed);
    return p;
  });
}

Json to_json(const DesignMatrix& d) {
  Json groups = Json::object();
  for (const auto& [j, g] : d.groups()) groups[std::to_string(j)] = g;
  Json rows = Json::array();
  for (Index i = 0; i < d.rows(); ++i) {
    const Vector r = d.columns().row(i).transpose();
    rows.push_back(vec(r));
  }
  return {{"params", to_json(d.params())},
          {"true_support", d.true_support()},
          {"groups", groups},
          {"columns", rows}};
}

DesignMatrix design_from_json(const Json& j) {
  return guarded("design", [&] {
    const DesignParams params = design_params_from_json(j.at("params"));
    const auto& rows = j.at("columns");
    const Index m = static_cast<Index>(rows.size());
    const Index p = m > 0 ? static_cast<Index>(rows.at(0).size()) : 0;
    Matrix A(m, p);
    for (Index i = 0; i < m; ++i) {
      const auto r = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      if (static_cast<Index>(r.size()) != p) throw ParseError("design: ragged columns array");
      for (Index c = 0; c < p; ++c) A(i, c) = r[static_cast<std::size_t>(c)];
    }
    std::map<Index, Support> groups;
    for (const auto& [key, g] : j.at("groups").items())
      groups[static_cast<Index>(std::stoll(key))] = support_from(g);
    return DesignMatrix(std::move(A), support_from(j.at("true_support")), std::move(groups),
                        params);
  });
}

Json to_json(const GroundTruth& t, const Observation& o) {
  return {{"w_star", vec(t.w_star)},     {"support", t.support},
          {"beta_min", t.beta_min},       {"sign_pattern", t.sign_pattern},
          {"y", vec(o.y)},                {"sigma", o.sigma},
          {"noise_seed", o.noise_seed}};
}

std::pair<GroundTruth, Observation> instance_from_json(const Json& j) {
  return guarded("instance", [&] {
    GroundTruth t;
    t.w_star = vec_from(j.at("w_star"));
    t.support = support_from(j.at("support"));
    t.beta_min = j.at("beta_min").get<double>();
    t.sign_pattern = j.at("sign_pattern").get<std::vector<int>>();
    Observation o;
    o.y = vec_from(j.at("y"));
    o.sigma = j.at("sigma").get<double>();
    o.noise_seed = j.at("noise_seed").get<Seed>();
    return std::pair{t, o};
  });
}

Json to_json(const CoherenceReport& r) {
  return {{"ic_value", number(r.ic_value)},
          {"mu_in_min", number(r.mu_in_min)},
          {"mu_out_max", number(r.mu_out_max)},
          {"kappa", number(r.kappa)},
          {"mutual_coherence", number(r.mutual_coherence)},
          {"signs", r.signs}};
}

Json to_json(const Estimate& e) {
  Json j = {{"solver_tag", std::string(to_string(e.solver_tag))},
            {"coefficients", vec(e.coefficients)},
            {"support", e.support}};
  Json trace = std::visit(
      [](const auto& t) -> Json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, LassoTrace>) {
          return {{"lambda", t.lambda},
                  {"sweeps", t.sweeps},
                  {"converged", t.converged},
                  {"objective", t.objective}};
        } else if constexpr (std::is_same_v<T, OmpTrace>) {
          Json steps = Json::array();
          for (const auto& s : t.steps)
            steps.push_back({{"selected", s.selected},
                             {"correlations", vec(s.correlations)},
                             {"residual_norm", s.residual_norm}});
          return {{"steps", steps}, {"first_step_misselection", t.first_step_misselection}};
        } else if constexpr (std::is_same_v<T, SblTrace>) {
          return {{"objective", t.objective},
                  {"iterations", t.iterations},
                  {"converged", t.converged},
                  {"restarts_run", t.restarts_run},
                  {"refinement_moves", t.refinement_moves},
                  {"pinned", t.pinned},
                  {"noise_variance", t.noise_variance}};
        } else if constexpr (std::is_same_v<T, OracleTrace>) {
          return {{"residual_norm", t.residual_norm}, {"subsets", t.subsets}};
        } else {
          return nullptr;
        }
      },
      e.trace);
  j["trace"] = trace;
  return j;
}

Json to_json(const OracleResult& r) {
  Json j = {{"best_support", r.best_support},
            {"best_residual_norm", r.best_residual_norm},
            {"coefficients", vec(r.coefficients)},
            {"enumerated", r.enumerated},
            {"skipped_singular", r.skipped_singular}};
  if (!r.per_support_table.empty()) {
    Json table = Json::array();
    for (const auto& s : r.per_support_table)
      table.push_back({{"support", s.support}, {"residual_norm", s.residual_norm}});
    j["per_support_table"] = table;
  }
  return j;
}

Json to_json(const LassoConfig& c) {
  return {{"lambda_grid", c.lambda_grid},
          {"max_iter", c.max_iter},
          {"tol", c.tol},
          {"support_threshold", c.support_threshold}};
}

Json to_json(const SblHyper& h) {
  return {{"a", h.a},
          {"b", h.b},
          {"noise_variance", h.noise_variance},
          {"estimate_noise", h.estimate_noise},
          {"max_outer_iter", h.max_outer_iter},
          {"inner_tol", h.inner_tol},
          {"prune_threshold", h.prune_threshold},
          {"refine_support", h.refine_support},
          {"restarts", h.restarts},
          {"restart_seed", h.restart_seed}};
}

Json to_json(const ExperimentConfig& c) {
  Json grid = Json::array();
  for (const auto& p : c.design_params_grid) grid.push_back(to_json(p));
  const auto& s = c.solvers;
  return {{"design_params_grid", grid},
          {"sigma_grid", c.sigma_grid},
          {"trials_per_cell", c.trials_per_cell},
          {"beta_min", c.beta_min},
          {"magnitude_max", c.magnitude_max},
          {"master_seed", c.master_seed},
          {"freeze_truth", c.freeze_truth},
          {"threads", c.threads},
          {"solvers",
           {{"lasso", to_json(s.lasso)},
            {"lasso_grid_points", s.lasso_grid_points},
            {"lasso_grid_ratio", s.lasso_grid_ratio},
            {"sbl", to_json(s.sbl)},
            {"sigma_floor", s.sigma_floor},
            {"omp_steps", s.omp_steps},
            {"run_lasso", s.run_lasso},
            {"run_omp", s.run_omp},
            {"run_sbl", s.run_sbl}}}};
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  return guarded("experiment config", [&] {
    reject_unknown(j,
                   {"design_params_grid", "sigma_grid", "trials_per_cell", "beta_min",
                    "magnitude_max", "master_seed", "freeze_truth", "threads", "solvers"},
                   "experiment config");
    ExperimentConfig c;
    for (const auto& p : j.at("design_params_grid"))
      c.design_params_grid.push_back(design_params_from_json(p));
    c.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
    read_opt(j, "trials_per_cell", c.trials_per_cell);
    read_opt(j, "beta_min", c.beta_min);
    read_opt(j, "magnitude_max", c.magnitude_max);
    read_opt(j, "master_seed", c.master_seed);
    read_opt(j, "freeze_truth", c.freeze_truth);
    read_opt(j, "threads", c.threads);
    if (j.contains("solvers")) {
      const auto& s = j.at("solvers");
      reject_unknown(s,
                     {"lasso", "lasso_grid_points", "lasso_grid_ratio", "sbl", "sigma_floor",
                      "omp_steps", "run_lasso", "run_omp", "run_sbl"},
                     "solvers");
      auto& out = c.solvers;
      read_opt(s, "lasso_grid_points", out.lasso_grid_points);
      read_opt(s, "lasso_grid_ratio", out.lasso_grid_ratio);
      read_opt(s, "sigma_floor", out.sigma_floor);
      read_opt(s, "omp_steps", out.omp_steps);
      read_opt(s, "run_lasso", out.run_lasso);
      read_opt(s, "run_omp", out.run_omp);
      read_opt(s, "run_sbl", out.run_sbl);
      if (s.contains("lasso")) {
        const auto& l = s.at("lasso");
        reject_unknown(l, {"lambda_grid", "max_iter", "tol", "support_threshold"}, "lasso");
        read_opt(l, "lambda_grid", out.lasso.lambda_grid);
        read_opt(l, "max_iter", out.lasso.max_iter);
        read_opt(l, "tol", out.lasso.tol);
        read_opt(l, "support_threshold", out.lasso.support_threshold);
      }
      if (s.contains("sbl")) {
        const auto& h = s.at("sbl");
        reject_unknown(h,
                       {"a", "b", "noise_variance", "estimate_noise", "max_outer_iter",
                        "inner_tol", "prune_threshold", "refine_support", "restarts",
                        "restart_seed"},
                       "sbl");
        read_opt(h, "a", out.sbl.a);
        read_opt(h, "b", out.sbl.b);
        read_opt(h, "noise_variance", out.sbl.noise_variance);
        read_opt(h, "estimate_noise", out.sbl.estimate_noise);
        read_opt(h, "max_outer_iter", out.sbl.max_outer_iter);
        read_opt(h, "inner_tol", out.sbl.inner_tol);
        read_opt(h, "prune_threshold", out.sbl.prune_threshold);
        read_opt(h, "refine_support", out.sbl.refine_support);
        read_opt(h, "restarts", out.sbl.restarts);
        read_opt(h, "restart_seed", out.sbl.restart_seed);
      }
    }
    return c;
  });
}

Json to_json(const TrialReport& t) {
  Json outs = Json::array();
  for (const auto& o : t.outcomes) {
    Json jo = {{"solver", std::string(to_string(o.solver))},
               {"exact_recovery", o.exact_recovery},
               {"hamming_distance", o.hamming_distance},
               {"failed", o.failed}};
    if (o.failed) jo["error"] = o.error;
    outs.push_back(jo);
  }
  return {{"cell_id", t.cell_id},
          {"trial", t.trial},
          {"truth_seed", t.truth_seed},
          {"noise_seed", t.noise_seed},
          {"outcomes", outs},
          {"omp_first_step_misselection", t.omp_first_step_misselection},
          {"ic_value", number(t.ic_value)},
          {"lasso_kkt_ok", t.lasso_kkt_ok},
          {"lasso_kkt_worst", t.lasso_kkt_worst},
          {"omp_orthogonal_ok", t.omp_orthogonal_ok},
          {"omp_orthogonality_worst", t.omp_orthogonality_worst},
          {"sbl_descent_ok", t.sbl_descent_ok}};
}

Json to_json(const CellSummary& c) {
  Json solvers = Json::array();
  for (const auto& s : c.solvers)
    solvers.push_back({{"solver", std::string(to_string(s.solver))},
                       {"trials", s.trials},
                       {"failures", s.failures},
                       {"recovery_rate", s.recovery_rate},
                       {"se", s.se},
                       {"mean_hamming", s.mean_hamming}});
  return {{"cell_id", c.cell_id},
          {"design", to_json(c.design)},
          {"sigma", c.sigma},
          {"trials", c.trials},
          {"solvers", solvers},
          {"omp_misselect_rate", c.omp_misselect_rate},
          {"omp_misselect_se", c.omp_misselect_se},
          {"ic_value", number(c.ic_value)},
          {"kappa", number(c.kappa)}};
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << '\n';
}

}  // namespace sparselab
