#pragma once

#include "sparselab/design.hpp"
#include "sparselab/estimate.hpp"
#include "sparselab/instance.hpp"

namespace sparselab {

/// Condition estimate (max |R_ii| / min |R_ii| of the running QR) beyond
/// which the selected columns count as numerically dependent.
inline constexpr double kOmpConditionLimit = 1e12;

/// k-step orthogonal matching pursuit. Each step picks argmax_j |<a_j, r>|
/// over unselected columns (lowest index wins ties), refits by least squares
/// through an incrementally extended QR factorisation and never drops an
/// index. The trace records every step's correlation vector and flags a
/// first pick outside the design's true support.
///
/// Throws std::invalid_argument unless 1 <= steps <= min(m, p), and
/// SingularLeastSquares when the condition estimate exceeds 1e12.
Estimate fit_omp(const DesignMatrix& design, const Observation& obs, Index steps);

}  // namespace sparselab
