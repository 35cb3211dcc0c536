#pragma once

#include <vector>

#include "sparselab/design.hpp"
#include "sparselab/types.hpp"

namespace sparselab {

/// Sparse coefficient vector w* on the design's true support.
struct GroundTruth {
  Vector w_star;
  Support support;
  double beta_min = 0.0;
  std::vector<int> sign_pattern;  // one entry per support index, in support order
};

/// y = A w* + eps with eps ~ N(0, sigma^2 I).
struct Observation {
  Vector y;
  double sigma = 0.0;
  Seed noise_seed = 0;
};

/// Magnitudes uniform on [beta_min, magnitude_max], Rademacher signs.
/// Throws std::invalid_argument unless 0 < beta_min <= magnitude_max.
GroundTruth sample_ground_truth(const DesignMatrix& design, double beta_min, double magnitude_max,
                                Seed seed);

/// Fixed-magnitude variant: every support coefficient is sign * magnitude.
GroundTruth fixed_ground_truth(const DesignMatrix& design, double magnitude,
                               std::vector<int> signs);

/// i.i.d. N(0, sigma^2) vector of length m from `seed`.
Vector gaussian_noise(Index m, double sigma, Seed seed);

Observation observe(const DesignMatrix& design, const GroundTruth& truth, double sigma,
                    Seed noise_seed);

}  // namespace sparselab
