#pragma once

#include <map>
#include <string>
#include <vector>

#include "sparselab/types.hpp"

namespace sparselab {

/// Knobs for a coherent coalition-incidence design.
///
/// The true support gets `k` prototype columns with pairwise inner product
/// `support_gram_offdiag`. Each prototype owns `group_size` near-duplicates at
/// inner product exactly `rho_in`. Remaining columns are random fillers kept
/// within `rho_out_max` of every structured column.
///
/// `duplicate_tilt` in [0, 1) rotates the off-prototype part of every
/// near-duplicate toward the next prototype of the support (cyclically), so
/// that a duplicate of j also correlates with a neighbouring true column. At 0
/// the duplicate perturbation is orthogonal to all prototypes.
struct DesignParams {
  Index m = 0;
  Index p = 0;
  Index k = 0;
  Index group_size = 1;
  double rho_in = 0.9;
  double rho_out_max = 0.1;
  double support_gram_offdiag = 0.0;
  double duplicate_tilt = 0.0;
  Seed seed = 0;

  /// Throws InfeasibleParams when any range constraint fails.
  void validate() const;

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

/// Immutable m x p design with unit-norm columns and group annotations.
class DesignMatrix {
 public:
  /// Checks shapes, column normalisation (1e-10), index ranges and that the
  /// groups are disjoint from each other and from the support. Coherence
  /// bounds are not enforced here; see structure_violations().
  DesignMatrix(Matrix columns, Support true_support, std::map<Index, Support> groups,
               DesignParams params);

  const Matrix& columns() const noexcept { return columns_; }
  Index rows() const noexcept { return columns_.rows(); }
  Index cols() const noexcept { return columns_.cols(); }
  const Support& true_support() const noexcept { return true_support_; }
  const std::map<Index, Support>& groups() const noexcept { return groups_; }
  const DesignParams& params() const noexcept { return params_; }

  /// Columns of A indexed by the true support, in support order.
  Matrix support_columns() const;

  /// Ascending complement of the true support.
  Support off_support() const;

  /// j if `col` is j or a member of G_j, -1 for fillers.
  Index group_owner(Index col) const;

 private:
  Matrix columns_;
  Support true_support_;
  std::map<Index, Support> groups_;
  DesignParams params_;
};

DesignMatrix build_design(const DesignParams& params);

/// Dense A^T A.
Matrix gram(const DesignMatrix& design);

/// Human-readable list of violated DesignMatrix invariants (empty when the
/// design satisfies unit norms, within-group coherence >= rho_in and
/// between-group coherence <= rho_out_max up to `tol`).
std::vector<std::string> structure_violations(const DesignMatrix& design, double tol = 1e-8);

/// Design whose columns are the identity; support and groups as given.
DesignMatrix identity_design(Index n, Support true_support);

}  // namespace sparselab
