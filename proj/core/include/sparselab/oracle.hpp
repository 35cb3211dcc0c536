#pragma once

#include <cstdint>
#include <vector>

#include "sparselab/design.hpp"
#include "sparselab/instance.hpp"

namespace sparselab {

/// Largest number of subsets best_subset will enumerate.
inline constexpr std::uint64_t kSubsetBudget = 10'000'000;

struct SubsetScore {
  Support support;
  double residual_norm = 0.0;
};

struct OracleResult {
  Support best_support;
  double best_residual_norm = 0.0;
  Vector coefficients;  // least-squares fit on best_support
  std::size_t enumerated = 0;
  std::size_t skipped_singular = 0;
  std::vector<SubsetScore> per_support_table;  // filled only on request
};

/// n choose r, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

/// Exhaustive least squares over every support of size exactly k_max.
/// Ties go to the lexicographically smallest support. Subsets whose columns
/// are numerically dependent are skipped and counted. Throws BudgetExceeded
/// when C(p, k_max) > 1e7. `threads` > 1 partitions the enumeration; the
/// answer does not depend on it.
OracleResult best_subset(const DesignMatrix& design, const Observation& obs, Index k_max,
                         bool full_table = false, unsigned threads = 1);

}  // namespace sparselab
