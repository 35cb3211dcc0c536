#include "sparselab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

Matrix support_gram(const DesignMatrix& design) {
  const Matrix as = design.support_columns();
  return as.transpose() * as;
}

// M = A_{S^c}^T A_S (A_S^T A_S)^{-1}, rows indexed by design.off_support().
Matrix irrepresentable_matrix(const DesignMatrix& design) {
  const Matrix gs = support_gram(design);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gs, Eigen::EigenvaluesOnly);
  const double kappa = eig.eigenvalues().minCoeff();
  if (kappa <= kSingularKappa)
    throw SingularSupportGram("support Gram smallest eigenvalue " + std::to_string(kappa) +
                              " <= 1e-10");
  const Matrix as = design.support_columns();
  const Support off = design.off_support();
  Matrix cross(static_cast<Index>(off.size()), as.cols());
  for (Index r = 0; r < cross.rows(); ++r)
    cross.row(r) = design.columns().col(off[r]).transpose() * as;
  // M^T = G^{-1} cross^T, solved rather than inverted.
  const Matrix mt = gs.llt().solve(cross.transpose());
  return mt.transpose();
}

}  // namespace

double irrepresentable_value(const DesignMatrix& design, std::span<const int> signs) {
  const auto k = design.true_support().size();
  if (signs.size() != k)
    throw std::invalid_argument("sign pattern length " + std::to_string(signs.size()) +
                                " != support size " + std::to_string(k));
  Vector s(static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
    s[static_cast<Index>(i)] = signs[i];
  }
  const Matrix m = irrepresentable_matrix(design);
  if (m.rows() == 0) return 0.0;
  return (m * s).cwiseAbs().maxCoeff();
}

double worst_case_irrepresentable(const DesignMatrix& design, std::vector<int>* argmax) {
  const Matrix m = irrepresentable_matrix(design);
  const Index k = static_cast<Index>(design.true_support().size());
  if (argmax) argmax->assign(static_cast<std::size_t>(k), 1);
  if (m.rows() == 0) return 0.0;
  Index row = 0;
  const double best = m.cwiseAbs().rowwise().sum().maxCoeff(&row);
  if (argmax)
    for (Index i = 0; i < k; ++i) (*argmax)[static_cast<std::size_t>(i)] = m(row, i) < 0 ? -1 : 1;
  return best;
}

double restricted_eigenvalue(const DesignMatrix& design) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(support_gram(design), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

CoherenceReport coherence_report(const DesignMatrix& design, std::span<const int> signs) {
  CoherenceReport rep;
  rep.signs.assign(signs.begin(), signs.end());
  rep.kappa = restricted_eigenvalue(design);
  rep.ic_value = irrepresentable_value(design, signs);

  const Matrix g = gram(design);
  const Index p = g.cols();
  double mc = 0.0;
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < j; ++i) mc = std::max(mc, std::abs(g(i, j)));
  rep.mutual_coherence = mc;

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  rep.mu_in_min = nan;
  rep.mu_out_max = nan;
  bool any = false;
  double in_min = std::numeric_limits<double>::infinity();
  double out_max = 0.0;
  for (const auto& [owner, members] : design.groups()) {
    for (Index l : members) {
      any = true;
      in_min = std::min(in_min, g(owner, l));
      for (Index r = 0; r < p; ++r) {
        if (r == owner || std::binary_search(members.begin(), members.end(), r)) continue;
        out_max = std::max(out_max, std::abs(g(l, r)));
      }
    }
  }
  if (any) {
    rep.mu_in_min = in_min;
    rep.mu_out_max = out_max;
  }
  return rep;
}

CoherenceReport worst_case_report(const DesignMatrix& design) {
  std::vector<int> signs;
  worst_case_irrepresentable(design, &signs);
  return coherence_report(design, signs);
}

}  // namespace sparselab
