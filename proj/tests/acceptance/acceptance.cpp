// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sparselab/bench.hpp"
#include "sparselab/diagnostics.hpp"
#include "sparselab/instance.hpp"
#include "sparselab/lasso.hpp"
#include "sparselab/omp.hpp"
#include "sparselab/oracle.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/sbl.hpp"
#include "sparselab/serialize.hpp"

using namespace sparselab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  std::string artifact;  // everything the run produced, for the determinism check
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Certificates collected from every solver call made by criteria 1-4.
struct Certificates {
  std::size_t lasso_fits = 0, lasso_bad = 0;
  std::size_t omp_fits = 0, omp_bad = 0;
  std::size_t sbl_fits = 0, sbl_bad = 0;
  double lasso_worst = 0.0, omp_worst = 0.0;

  void lasso(const DesignMatrix& d, const Observation& o, const std::vector<PathPoint>& path,
             double slack) {
    for (const auto& pt : path) {
      const KktCheck k = lasso_kkt(d, o, pt.estimate.coefficients, pt.lambda);
      ++lasso_fits;
      lasso_worst = std::max({lasso_worst, k.max_zero_violation, k.max_active_violation});
      if (!k.ok(slack)) ++lasso_bad;
    }
  }
  void omp(const DesignMatrix& d, const Observation& o, const Estimate& e) {
    ++omp_fits;
    const Vector r = o.y - d.columns() * e.coefficients;
    bool ok = true;
    for (Index j : e.support) {
      const double v = std::abs(d.columns().col(j).dot(r));
      omp_worst = std::max(omp_worst, v);
      if (v > 1e-8) ok = false;
    }
    if (!ok) ++omp_bad;
  }
  void sbl(const Estimate& e) {
    ++sbl_fits;
    const auto& obj = std::get<SblTrace>(e.trace).objective;
    for (std::size_t i = 1; i < obj.size(); ++i)
      if (obj[i] > obj[i - 1] + 1e-10 * std::max(1.0, std::abs(obj[i - 1]))) {
        ++sbl_bad;
        return;
      }
  }
  void absorb(const ExperimentReport& rep) {
    for (const auto& t : rep.trials) {
      for (const auto& o : t.outcomes) {
        if (o.failed) continue;
        if (o.solver == SolverTag::lasso) {
          ++lasso_fits;
          if (!t.lasso_kkt_ok) ++lasso_bad;
        } else if (o.solver == SolverTag::omp) {
          ++omp_fits;
          if (!t.omp_orthogonal_ok) ++omp_bad;
        } else if (o.solver == SolverTag::sbl) {
          ++sbl_fits;
          if (!t.sbl_descent_ok) ++sbl_bad;
        }
      }
      lasso_worst = std::max(lasso_worst, t.lasso_kkt_worst);
      omp_worst = std::max(omp_worst, t.omp_orthogonality_worst);
    }
  }
};

struct NoiselessInstance {
  DesignMatrix design;
  GroundTruth truth;
  SblHyper hyper;
};

constexpr Seed kMaster = 20240611;
constexpr double kSigmaFloor = 0.01;
// SBL shape for every fit in this suite; the library default is 1.
constexpr double kShape = 2.0;

// ---------------------------------------------------------------- criterion 1
Verdict criterion1(Certificates& cert, std::vector<NoiselessInstance>* noiseless) {
  const auto t0 = Clock::now();
  Verdict v;
  Json art = Json::array();
  int agree[2] = {0, 0};
  const double sigmas[2] = {0.0, 0.05};
  for (int s = 0; s < 2; ++s) {
    for (int i = 0; i < 50; ++i) {
      DesignParams dp;
      dp.m = 30;
      dp.p = 18;
      dp.k = 3;
      dp.group_size = 1;
      dp.rho_in = 0.95;
      dp.rho_out_max = 0.2;
      dp.seed = derive_seed(kMaster, {1, static_cast<std::uint64_t>(i)});
      const DesignMatrix d = build_design(dp);
      const GroundTruth t = sample_ground_truth(d, 1.0, 1.0, derive_seed(dp.seed, {1}));
      const Observation o = observe(d, t, sigmas[s], derive_seed(dp.seed, {2, static_cast<std::uint64_t>(s)}));
      SblHyper h;
      h.a = kShape;
      const double sd = std::max(sigmas[s], kSigmaFloor);
      h.noise_variance = sd * sd;
      const Estimate e = fit_sbl(d, o, h);
      cert.sbl(e);
      const OracleResult orc = best_subset(d, o, dp.k);
      LassoConfig lc;
      cert.lasso(d, o, lasso_path(d, o, lc), 10.0 * lc.tol);
      cert.omp(d, o, fit_omp(d, o, dp.k));
      const bool ok = e.support == orc.best_support && orc.best_support == d.true_support();
      agree[s] += ok ? 1 : 0;
      art.push_back({{"sigma", sigmas[s]},
                     {"i", i},
                     {"sbl", to_json(e)},
                     {"oracle", to_json(orc)}});
      if (s == 0 && noiseless) noiseless->push_back({d, t, h});
    }
  }
  const double secs = seconds_since(t0);
  v.pass = agree[0] >= 48 && agree[1] >= 45 && secs < 60.0;
  v.detail = fmt("SBL = oracle = S* in %d/50 noiseless (need 48), %d/50 at sigma=0.05 (need 45); "
                 "%.1f s (limit 60)",
                 agree[0], agree[1], secs);
  v.artifact = art.dump();
  return v;
}

// ---------------------------------------------------------------- criterion 2
ExperimentConfig separation_config() {
  ExperimentConfig c;
  for (double rho : {0.95, 0.99}) {
    DesignParams dp;
    dp.m = 100;
    dp.p = 200;
    dp.k = 5;
    dp.group_size = 3;
    dp.rho_in = rho;
    dp.rho_out_max = 0.3;
    dp.support_gram_offdiag = 0.0;
    dp.duplicate_tilt = 0.5;
    dp.seed = 1;
    c.design_params_grid.push_back(dp);
  }
  c.sigma_grid = {0.15};
  c.trials_per_cell = 200;
  c.beta_min = 1.0;
  c.magnitude_max = 20.0;
  c.solvers.sbl.a = kShape;
  c.solvers.sbl.b = 1e-4;
  c.solvers.sigma_floor = kSigmaFloor;
  c.master_seed = kMaster;
  c.threads = 1;
  return c;
}

Verdict criterion2(Certificates& cert) {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = separation_config();
  const ExperimentReport rep = run_experiment(cfg);
  cert.absorb(rep);
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = secs < 600.0;
  std::string cells;
  for (const auto& c : rep.cells) {
    const SolverSummary *lasso = nullptr, *omp = nullptr, *sbl = nullptr;
    for (const auto& s : c.solvers) {
      if (s.solver == SolverTag::lasso) lasso = &s;
      if (s.solver == SolverTag::omp) omp = &s;
      if (s.solver == SolverTag::sbl) sbl = &s;
    }
    cells += fmt(" [rho=%.2f: sbl %.3f+-%.3f, lasso %.3f+-%.3f, omp %.3f+-%.3f]", c.design.rho_in,
                 sbl->recovery_rate, sbl->se, lasso->recovery_rate, lasso->se, omp->recovery_rate,
                 omp->se);
    if (c.design.rho_in < 0.99) continue;
    for (const SolverSummary* other : {lasso, omp}) {
      const bool gap = sbl->recovery_rate - other->recovery_rate >= 0.10;
      const bool separated = sbl->recovery_rate - 2.0 * sbl->se > other->recovery_rate + 2.0 * other->se;
      if (!gap || !separated) v.pass = false;
    }
  }
  v.detail = fmt("%s; %.1f s (limit 600)", cells.c_str(), secs);
  v.artifact = cells_csv(rep.cells) + trials_jsonl(rep.trials);
  return v;
}

// ---------------------------------------------------------------- criterion 3
Verdict criterion3(Certificates& cert) {
  const double rho = 0.99, beta = 1.0, sigma = 0.5;
  DesignParams dp;
  dp.m = 10;
  dp.p = 2;
  dp.k = 1;
  dp.group_size = 1;
  dp.rho_in = rho;
  dp.rho_out_max = 0.1;
  dp.seed = derive_seed(kMaster, {3});
  const DesignMatrix d = build_design(dp);
  const GroundTruth t = fixed_ground_truth(d, beta, {1});
  std::vector<bool> miss;
  std::string art;
  for (int i = 0; i < 2000; ++i) {
    const Observation o = observe(d, t, sigma, derive_seed(kMaster, {3, static_cast<std::uint64_t>(i)}));
    const Estimate e = fit_omp(d, o, 1);
    cert.omp(d, o, e);
    const bool m = std::get<OmpTrace>(e.trace).first_step_misselection;
    miss.push_back(m);
    art += m ? '1' : '0';
  }
  const auto [rate, se] = binomial_rate(miss);
  const double signed_p = misselection_probability(beta, rho, sigma);
  const double abs_p = misselection_probability_abs(beta, rho, sigma);
  const double exact_se = std::sqrt(signed_p * (1.0 - signed_p) / 2000.0);
  Verdict v;
  v.pass = std::abs(rate - signed_p) <= 3.0 * exact_se && rate >= 0.05;
  v.detail = fmt("empirical %.4f, closed form %.4f (|T| form %.4f), 3 SE = %.4f", rate, signed_p,
                 abs_p, 3.0 * exact_se);
  v.artifact = art;
  return v;
}

// ---------------------------------------------------------------- criterion 4
Verdict criterion4() {
  Verdict v;
  v.pass = true;
  std::string detail;
  Json art = Json::array();
  for (double rho : {0.9, 0.99, 0.999}) {
    DesignParams dp;
    dp.m = 10;
    dp.p = 2;
    dp.k = 1;
    dp.group_size = 1;
    dp.rho_in = rho;
    dp.rho_out_max = std::min(0.1, rho / 2);
    dp.seed = derive_seed(kMaster, {4});
    const DesignMatrix d = build_design(dp);
    const std::vector<int> plus{1};
    const double ic = irrepresentable_value(d, plus);
    if (std::abs(ic - rho) > 1e-8) v.pass = false;
    detail += fmt("ic(%.3f)=%.12f ", rho, ic);
    art.push_back(ic);
  }
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a(0, 2) = 0.95;
  a(1, 2) = 0.3;
  a(2, 2) = std::sqrt(1.0 - 0.95 * 0.95 - 0.3 * 0.3);
  DesignParams hp;
  hp.m = 3;
  hp.p = 3;
  hp.k = 2;
  hp.group_size = 1;
  const DesignMatrix hand(a, {0, 1}, {{0, {2}}}, hp);
  const std::vector<int> pp{1, 1};
  const double ic = irrepresentable_value(hand, pp);
  if (std::abs(ic - 1.25) > 1e-8 || !(ic > 1.0)) v.pass = false;
  detail += fmt("hand-built k=2: %.12f", ic);
  art.push_back(ic);
  v.detail = detail;
  v.artifact = art.dump();
  return v;
}

// ---------------------------------------------------------------- criterion 5
Verdict criterion5(const Certificates& cert, const std::vector<NoiselessInstance>& noiseless) {
  Verdict v;
  Rng rng(derive_seed(kMaster, {5}));
  int concave_bad = 0, monotone_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    SblHyper h;
    h.a = rng.uniform(0.5 + 1e-3, 5.0);
    h.b = std::exp(rng.uniform(std::log(1e-6), std::log(10.0)));
    double s1 = std::exp(rng.uniform(std::log(1e-8), std::log(100.0)));
    double s2 = std::exp(rng.uniform(std::log(1e-8), std::log(100.0)));
    if (i % 10 == 0) s1 = 0.0;
    if (s1 > s2) std::swap(s1, s2);
    if (s1 == s2) continue;
    const double th = rng.uniform(0.0, 1.0);
    const double lhs = sbl_penalty(th * s1 + (1.0 - th) * s2, h);
    const double rhs = th * sbl_penalty(s1, h) + (1.0 - th) * sbl_penalty(s2, h);
    if (lhs < rhs - 1e-12) ++concave_bad;
    if (!(sbl_penalty(s2, h) > sbl_penalty(s1, h))) ++monotone_bad;
  }
  SblHyper h0;
  const bool strict = sbl_penalty(0.5, h0) > 0.5 * sbl_penalty(0.0, h0) + 0.5 * sbl_penalty(1.0, h0);

  std::size_t checks = 0, spurious_bad = 0;
  for (const auto& inst : noiseless) {
    const Observation o = observe(inst.design, inst.truth, 0.0, 0);
    const double base = sbl_objective(inst.truth.w_star, inst.design, o, inst.hyper).total;
    for (Index l : inst.design.off_support()) {
      for (double dv : {0.01, -0.01, 1e-3, -1e-3, 1e-5, -1e-5}) {
        Vector w = inst.truth.w_star;
        w[l] += dv;
        ++checks;
        if (!(sbl_objective(w, inst.design, o, inst.hyper).total > base)) ++spurious_bad;
      }
    }
  }
  v.pass = concave_bad == 0 && monotone_bad == 0 && strict && cert.sbl_bad == 0 &&
           spurious_bad == 0 && checks > 0 && cert.sbl_fits > 0;
  v.detail = fmt("concavity violations %d/1000, monotonicity violations %d/1000, strict at (0,1): %s; "
                 "MM descent broken on %zu/%zu fits; spurious-index failures %zu/%zu",
                 concave_bad, monotone_bad, strict ? "yes" : "no", cert.sbl_bad, cert.sbl_fits,
                 spurious_bad, checks);
  return v;
}

// ---------------------------------------------------------------- criterion 6
// Exact LASSO minimum for tiny p: every (active set, sign pattern) whose
// stationarity solution keeps its signs and satisfies the zero-coordinate
// conditions is a global minimiser of the convex problem.
double lasso_qp_oracle(const Matrix& A, const Vector& y, double lambda) {
  const Index p = A.cols();
  const Matrix G = A.transpose() * A;
  const Vector c = A.transpose() * y;
  double best = 0.5 * y.squaredNorm();
  std::vector<int> code(static_cast<std::size_t>(p), 0);  // 0 zero, 1 positive, 2 negative
  while (true) {
    std::vector<Index> act;
    for (Index j = 0; j < p; ++j)
      if (code[static_cast<std::size_t>(j)] != 0) act.push_back(j);
    const Index n = static_cast<Index>(act.size());
    if (n > 0 && n <= A.rows()) {
      Matrix g(n, n);
      Vector rhs(n);
      for (Index i = 0; i < n; ++i) {
        const double s = code[static_cast<std::size_t>(act[i])] == 1 ? 1.0 : -1.0;
        rhs[i] = c[act[i]] - lambda * s;
        for (Index k = 0; k < n; ++k) g(i, k) = G(act[i], act[k]);
      }
      Eigen::FullPivLU<Matrix> lu(g);
      if (lu.isInvertible()) {
        const Vector ws = lu.solve(rhs);
        bool signs_ok = true;
        for (Index i = 0; i < n; ++i) {
          const double s = code[static_cast<std::size_t>(act[i])] == 1 ? 1.0 : -1.0;
          if (!(ws[i] * s > 0.0)) signs_ok = false;
        }
        if (signs_ok) {
          Vector w = Vector::Zero(p);
          for (Index i = 0; i < n; ++i) w[act[i]] = ws[i];
          best = std::min(best, 0.5 * (y - A * w).squaredNorm() + lambda * w.lpNorm<1>());
        }
      }
    }
    Index j = 0;
    while (j < p && code[static_cast<std::size_t>(j)] == 2) code[static_cast<std::size_t>(j++)] = 0;
    if (j == p) break;
    ++code[static_cast<std::size_t>(j)];
  }
  return best;
}

Verdict criterion6(Certificates& cert) {
  double worst_gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    DesignParams dp;
    dp.m = 8;
    dp.p = 6;
    dp.k = 2;
    dp.group_size = 1;
    dp.rho_in = 0.9;
    dp.rho_out_max = 0.5;
    dp.seed = derive_seed(kMaster, {6, static_cast<std::uint64_t>(i)});
    const DesignMatrix d = build_design(dp);
    const GroundTruth t = sample_ground_truth(d, 1.0, 2.0, derive_seed(dp.seed, {1}));
    const Observation o = observe(d, t, 0.0, 0);
    LassoConfig lc;
    const auto path = lasso_path(d, o, lc);
    cert.lasso(d, o, path, 10.0 * lc.tol);
    for (std::size_t g = 0; g < path.size(); g += 7) {
      const double ours = lasso_objective(d, o, path[g].estimate.coefficients, path[g].lambda);
      const double ref = lasso_qp_oracle(d.columns(), o.y, path[g].lambda);
      worst_gap = std::max(worst_gap, std::abs(ours - ref));
    }
    cert.omp(d, o, fit_omp(d, o, dp.k));
  }
  Verdict v;
  v.pass = cert.lasso_bad == 0 && cert.omp_bad == 0 && worst_gap <= 1e-6 && cert.lasso_fits > 0 &&
           cert.omp_fits > 0;
  v.detail = fmt("KKT failures %zu/%zu (worst residual %.2e); OMP orthogonality failures %zu/%zu "
                 "(worst %.2e); QP oracle max objective gap %.2e",
                 cert.lasso_bad, cert.lasso_fits, cert.lasso_worst, cert.omp_bad, cert.omp_fits,
                 cert.omp_worst, worst_gap);
  return v;
}

void report(int id, const char* name, const Verdict& v, int& failures) {
  std::printf("[%s] criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

}  // namespace

int main() {
  int failures = 0;
  Certificates cert;
  std::vector<NoiselessInstance> noiseless;

  const Verdict c1 = criterion1(cert, &noiseless);
  report(1, "SBL matches the best-subset oracle", c1, failures);
  const Verdict c2 = criterion2(cert);
  report(2, "three-way separation", c2, failures);
  const Verdict c3 = criterion3(cert);
  report(3, "OMP mis-selection law", c3, failures);
  const Verdict c4 = criterion4();
  report(4, "irrepresentable boundary", c4, failures);
  report(5, "SBL objective properties", criterion5(cert, noiseless), failures);
  report(6, "solver certificates", criterion6(cert), failures);

  Certificates scratch;
  const bool same = criterion1(scratch, nullptr).artifact == c1.artifact &&
                    criterion2(scratch).artifact == c2.artifact &&
                    criterion3(scratch).artifact == c3.artifact &&
                    criterion4().artifact == c4.artifact;
  Verdict c7;
  c7.pass = same;
  c7.detail = same ? "criteria 1-4 rerun byte-identical" : "rerun of criteria 1-4 differs";
  report(7, "determinism", c7, failures);

  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
