#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sparselab {

using Index = Eigen::Index;
using Seed = std::uint64_t;

/// Ascending list of column indices.
using Support = std::vector<Index>;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace sparselab
