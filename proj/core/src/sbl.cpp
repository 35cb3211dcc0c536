#include "sparselab/sbl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "sparselab/rng.hpp"

namespace sparselab {

void SblHyper::validate() const {
  if (!(a > 0.5)) throw std::invalid_argument("SBL shape a must exceed 1/2");
  if (!(b > 0.0)) throw std::invalid_argument("SBL rate b must be positive");
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be positive");
  if (max_outer_iter < 1) throw std::invalid_argument("max_outer_iter must be >= 1");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
  if (!(prune_threshold > 0.0)) throw std::invalid_argument("prune_threshold must be positive");
  if (restarts < 0) throw std::invalid_argument("restarts must be >= 0");
}

double sbl_penalty(double s, const SblHyper& hyper) {
  return (hyper.a - 0.5) * std::log(hyper.b + 0.5 * s);
}

double profiled_alpha(double w, const SblHyper& hyper) {
  return (hyper.a - 0.5) / (hyper.b + 0.5 * w * w);
}

double sbl_support_threshold(const SblHyper& hyper) { return std::sqrt(2.0 * hyper.b); }

SblObjective sbl_objective(const Vector& w, const DesignMatrix& design, const Observation& obs,
                           const SblHyper& hyper) {
  SblObjective out;
  out.data_fit = (obs.y - design.columns() * w).squaredNorm() / (2.0 * hyper.noise_variance);
  for (Index j = 0; j < w.size(); ++j) out.penalty += sbl_penalty(w[j] * w[j], hyper);
  out.total = out.data_fit + out.penalty;
  return out;
}

namespace {

struct Problem {
  const Matrix& A;
  const Vector& y;
  Matrix G;
  Vector aty;
  double yty;
  SblHyper hyper;

  Problem(const DesignMatrix& design, const Observation& obs, const SblHyper& h)
      : A(design.columns()),
        y(obs.y),
        G(design.columns().transpose() * design.columns()),
        aty(design.columns().transpose() * obs.y),
        yty(obs.y.squaredNorm()),
        hyper(h) {}

  Index m() const { return A.rows(); }
  Index p() const { return A.cols(); }

  double noise_term(double s2) const {
    return hyper.estimate_noise ? 0.5 * static_cast<double>(m()) * std::log(s2) : 0.0;
  }

  double objective(const Vector& w, double s2) const {
    double pen = 0.0;
    for (Index j = 0; j < w.size(); ++j) pen += sbl_penalty(w[j] * w[j], hyper);
    return (y - A * w).squaredNorm() / (2.0 * s2) + pen + noise_term(s2);
  }

  // argmin ||y - A_F w_F||^2 / (2 s2) + (1/2) sum_F alpha_j w_j^2, zero off F.
  Vector ridge(const Vector& alpha, const std::vector<Index>& free, double s2) const {
    const Index nf = static_cast<Index>(free.size());
    Vector w = Vector::Zero(p());
    if (nf == 0) return w;
    Vector wf;
    if (nf <= m()) {
      Matrix M(nf, nf);
      Vector rhs(nf);
      for (Index c = 0; c < nf; ++c) {
        rhs[c] = aty[free[c]];
        for (Index r = 0; r < nf; ++r) M(r, c) = G(free[r], free[c]);
        M(c, c) += s2 * alpha[free[c]];
      }
      wf = M.llt().solve(rhs);
    } else {
      // Woodbury form: w_F = D^{-1} A_F^T (s2 I + A_F D^{-1} A_F^T)^{-1} y.
      Matrix scaled(m(), nf);
      Vector dinv(nf);
      for (Index c = 0; c < nf; ++c) {
        dinv[c] = 1.0 / alpha[free[c]];
        scaled.col(c) = A.col(free[c]) * std::sqrt(dinv[c]);
      }
      Matrix K = Matrix::Identity(m(), m()) * s2;
      K.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
      const Vector u = K.selfadjointView<Eigen::Lower>().llt().solve(y);
      wf = dinv.cwiseSqrt().cwiseProduct(scaled.transpose() * u);
    }
    for (Index c = 0; c < nf; ++c) w[free[c]] = wf[c];
    return w;
  }
};

struct Run {
  Vector w;
  std::vector<bool> pinned;
  double s2 = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;

  double last() const { return trace.back(); }
};

// MM loop from a given alpha (pinned set empty at entry).
Run mm_run(const Problem& pb, Vector alpha, double s2) {
  const SblHyper& h = pb.hyper;
  const double s2_floor = 1e-6 * h.noise_variance;
  Run run;
  run.pinned.assign(static_cast<std::size_t>(pb.p()), false);
  run.s2 = s2;
  std::vector<Index> free(static_cast<std::size_t>(pb.p()));
  for (Index j = 0; j < pb.p(); ++j) free[static_cast<std::size_t>(j)] = j;

  run.w = pb.ridge(alpha, free, run.s2);
  run.trace.push_back(pb.objective(run.w, run.s2));
  while (run.iterations < h.max_outer_iter) {
    bool pinned_any = false;
    for (Index j = 0; j < pb.p(); ++j) {
      if (run.pinned[static_cast<std::size_t>(j)]) continue;
      alpha[j] = profiled_alpha(run.w[j], h);
      if (alpha[j] > h.prune_threshold) {
        run.pinned[static_cast<std::size_t>(j)] = true;
        run.w[j] = 0.0;
        pinned_any = true;
      }
    }
    if (pinned_any) {
      free.clear();
      for (Index j = 0; j < pb.p(); ++j)
        if (!run.pinned[static_cast<std::size_t>(j)]) free.push_back(j);
    }
    if (h.estimate_noise)
      run.s2 = std::max((pb.y - pb.A * run.w).squaredNorm() / static_cast<double>(pb.m()), s2_floor);
    run.w = pb.ridge(alpha, free, run.s2);
    const double prev = run.last();
    const double cur = pb.objective(run.w, run.s2);
    run.trace.push_back(cur);
    ++run.iterations;
    if (std::abs(prev - cur) <= h.inner_tol * std::max(1.0, std::abs(cur))) {
      run.converged = true;
      break;
    }
  }
  return run;
}

Vector alpha_from(const Vector& w, const SblHyper& h) {
  Vector alpha(w.size());
  for (Index j = 0; j < w.size(); ++j) alpha[j] = profiled_alpha(w[j], h);
  return alpha;
}

struct Restricted {
  Support support;
  Vector w;  // full length, zero off support
  double objective = std::numeric_limits<double>::infinity();
};

// Objective minimised over vectors supported on S, started from least squares on S.
Restricted solve_restricted(const Problem& pb, const Support& S, double s2) {
  const SblHyper& h = pb.hyper;
  const Index n = static_cast<Index>(S.size());
  Restricted out;
  out.support = S;
  out.w = Vector::Zero(pb.p());
  const double phi0 = sbl_penalty(0.0, h);
  Matrix g(n, n);
  Vector c(n);
  for (Index i = 0; i < n; ++i) {
    c[i] = pb.aty[S[i]];
    for (Index j = 0; j < n; ++j) g(i, j) = pb.G(S[i], S[j]);
  }
  Vector ws = Vector::Zero(n);
  if (n > 0) {
    Eigen::LDLT<Matrix> ls(g);
    ws = ls.solve(c);
    if (ls.info() != Eigen::Success || !ws.allFinite()) {
      Matrix reg = g;
      reg.diagonal().array() += s2;
      ws = reg.llt().solve(c);
    }
    for (int it = 0; it < 500; ++it) {
      Matrix M = g;
      for (Index i = 0; i < n; ++i) M(i, i) += s2 * profiled_alpha(ws[i], h);
      Vector next = M.llt().solve(c);
      const double change = (next - ws).cwiseAbs().maxCoeff();
      ws = next;
      if (change <= 1e-13 * (1.0 + ws.cwiseAbs().maxCoeff())) break;
    }
  }
  const double rss = std::max(pb.yty - 2.0 * ws.dot(c) + ws.dot(g * ws), 0.0);
  double pen = static_cast<double>(pb.p() - n) * phi0;
  for (Index i = 0; i < n; ++i) {
    pen += sbl_penalty(ws[i] * ws[i], h);
    out.w[S[i]] = ws[i];
  }
  out.objective = rss / (2.0 * s2) + pen + pb.noise_term(s2);
  return out;
}

// Columns outside `in` ranked by the least-squares gain of adding them to `base`.
std::vector<Index> screen(const Problem& pb, const Support& base, const std::vector<bool>& in,
                          std::size_t keep) {
  const Index n = static_cast<Index>(base.size());
  Vector r = pb.y;
  Matrix qa = pb.A;  // columns projected off span(A_base)
  if (n > 0) {
    Matrix sub(pb.m(), n);
    for (Index i = 0; i < n; ++i) sub.col(i) = pb.A.col(base[static_cast<std::size_t>(i)]);
    Eigen::HouseholderQR<Matrix> qr(sub);
    const Matrix q = qr.householderQ() * Matrix::Identity(pb.m(), n);
    r -= q * (q.transpose() * r);
    qa -= q * (q.transpose() * pb.A);
  }
  std::vector<std::pair<double, Index>> gains;
  for (Index j = 0; j < pb.p(); ++j) {
    if (in[static_cast<std::size_t>(j)]) continue;
    const double den = qa.col(j).squaredNorm();
    if (den <= 1e-12) continue;
    const double num = qa.col(j).dot(r);
    gains.emplace_back(-num * num / den, j);
  }
  const std::size_t take = std::min(keep, gains.size());
  std::partial_sort(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(take), gains.end());
  std::vector<Index> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(gains[i].second);
  return out;
}

// Best-improvement local search over add / drop / swap moves. Swap and add
// partners are screened by least-squares gain before the exact evaluation.
Restricted refine(const Problem& pb, Support S, double s2, int& moves) {
  constexpr std::size_t kCandidates = 5;
  const double thr = sbl_support_threshold(pb.hyper);
  Restricted best = solve_restricted(pb, S, s2);
  const Index p = pb.p();
  for (int pass = 0; pass < 100; ++pass) {
    Restricted cand_best = best;
    std::vector<bool> in(static_cast<std::size_t>(p), false);
    for (Index j : best.support) in[static_cast<std::size_t>(j)] = true;
    // A candidate counts only if every coefficient on it clears the support
    // threshold; otherwise it is not the support it claims to be.
    auto consider = [&](Support cand) {
      std::sort(cand.begin(), cand.end());
      Restricted r = solve_restricted(pb, cand, s2);
      for (Index j : cand)
        if (std::abs(r.w[j]) <= thr) return;
      if (r.objective < cand_best.objective) cand_best = std::move(r);
    };
    for (std::size_t i = 0; i < best.support.size(); ++i) {
      Support drop = best.support;
      drop.erase(drop.begin() + static_cast<std::ptrdiff_t>(i));
      for (Index q : screen(pb, drop, in, kCandidates)) {
        Support swap = drop;
        swap.push_back(q);
        consider(std::move(swap));
      }
      consider(std::move(drop));
    }
    for (Index q : screen(pb, best.support, in, kCandidates)) {
      Support add = best.support;
      add.push_back(q);
      consider(std::move(add));
    }
    if (!(cand_best.objective < best.objective - 1e-12 * std::max(1.0, std::abs(best.objective))))
      break;
    best = std::move(cand_best);
    ++moves;
  }
  return best;
}

Support run_support(const Run& run, double threshold) {
  Support s;
  for (Index j = 0; j < run.w.size(); ++j)
    if (!run.pinned[static_cast<std::size_t>(j)] && std::abs(run.w[j]) > threshold) s.push_back(j);
  return s;
}

struct Outcome {
  Run run;
  int moves = 0;
};

Outcome optimise(const Problem& pb, const Vector& alpha0) {
  const SblHyper& h = pb.hyper;
  Outcome out{mm_run(pb, alpha0, h.noise_variance), 0};
  if (!h.refine_support) return out;

  const double thr = sbl_support_threshold(h);
  int moves = 0;
  const Restricted best = refine(pb, run_support(out.run, thr), out.run.s2, moves);
  if (moves == 0) return out;

  Run polished = mm_run(pb, alpha_from(best.w, h), out.run.s2);
  if (!(polished.last() < out.run.last())) return out;
  // Splice: keep the first run's history, then the polished iterates that improve on it.
  const double floor = out.run.last();
  std::vector<double> spliced = std::move(out.run.trace);
  for (double v : polished.trace)
    if (v < floor && v <= spliced.back()) spliced.push_back(v);
  polished.iterations += out.run.iterations;
  polished.trace = std::move(spliced);
  out.run = std::move(polished);
  out.moves = moves;
  return out;
}

}  // namespace

Estimate fit_sbl(const DesignMatrix& design, const Observation& obs, const SblHyper& hyper) {
  hyper.validate();
  const Problem pb(design, obs, hyper);

  Outcome best = optimise(pb, Vector::Ones(pb.p()));
  if (hyper.restarts > 0) {
    Rng rng(hyper.restart_seed);
    for (int r = 0; r < hyper.restarts; ++r) {
      Vector alpha0(pb.p());
      for (Index j = 0; j < pb.p(); ++j) alpha0[j] = std::exp(rng.uniform(-3.0, 3.0));
      Outcome cand = optimise(pb, alpha0);
      if (cand.run.last() < best.run.last()) best = std::move(cand);
    }
  }

  SblTrace trace;
  trace.objective = best.run.trace;
  trace.iterations = best.run.iterations;
  trace.converged = best.run.converged;
  trace.restarts_run = hyper.restarts;
  trace.refinement_moves = best.moves;
  trace.noise_variance = best.run.s2;
  for (Index j = 0; j < pb.p(); ++j)
    if (best.run.pinned[static_cast<std::size_t>(j)]) trace.pinned.push_back(j);

  Estimate est;
  est.support = run_support(best.run, sbl_support_threshold(hyper));
  est.coefficients = std::move(best.run.w);
  est.solver_tag = SolverTag::sbl;
  est.trace = std::move(trace);
  return est;
}

}  // namespace sparselab
