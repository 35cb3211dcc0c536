#pragma once

#include <span>
#include <vector>

#include "sparselab/design.hpp"

namespace sparselab {

/// Smallest support-Gram eigenvalue treated as full rank.
inline constexpr double kSingularKappa = 1e-10;

struct CoherenceReport {
  double ic_value = 0.0;          // irrepresentable statistic for the given signs
  double mu_in_min = 0.0;         // min <a_j, a_l> over l in G_j (NaN without groups)
  double mu_out_max = 0.0;        // max |<a_l, a_r>| over l in G_j, r outside {j} u G_j (NaN without groups)
  double kappa = 0.0;             // smallest eigenvalue of A_S^T A_S
  double mutual_coherence = 0.0;  // max off-diagonal |Gram| entry
  std::vector<int> signs;         // sign pattern the IC value refers to
};

/// || A_{S^c}^T A_S (A_S^T A_S)^{-1} s ||_inf, via a Cholesky solve on the
/// k x k support Gram. Throws SingularSupportGram when kappa <= 1e-10 and
/// std::invalid_argument when `signs` is not a +-1 vector of length k.
double irrepresentable_value(const DesignMatrix& design, std::span<const int> signs);

/// Largest IC value over all 2^k sign patterns. The maximiser of
/// ||M s||_inf over s in {-1,1}^k is the sign vector of the row of M with
/// the largest l1 norm, so no enumeration is needed. `argmax` receives it.
double worst_case_irrepresentable(const DesignMatrix& design, std::vector<int>* argmax = nullptr);

/// Smallest eigenvalue of A_S^T A_S.
double restricted_eigenvalue(const DesignMatrix& design);

CoherenceReport coherence_report(const DesignMatrix& design, std::span<const int> signs);

/// Report for the worst-case sign pattern.
CoherenceReport worst_case_report(const DesignMatrix& design);

}  // namespace sparselab
