#include "sparselab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>

namespace sparselab {

std::string_view to_string(SolverTag tag) noexcept {
  switch (tag) {
    case SolverTag::lasso: return "lasso";
    case SolverTag::omp: return "omp";
    case SolverTag::sbl: return "sbl";
    case SolverTag::oracle: return "oracle";
  }
  return "unknown";
}

SolverTag solver_tag_from_string(std::string_view name) {
  if (name == "lasso") return SolverTag::lasso;
  if (name == "omp") return SolverTag::omp;
  if (name == "sbl") return SolverTag::sbl;
  if (name == "oracle") return SolverTag::oracle;
  throw std::invalid_argument("unknown solver tag '" + std::string(name) + "'");
}

Support support_of(const Vector& w, double threshold) {
  Support s;
  for (Index j = 0; j < w.size(); ++j)
    if (std::abs(w[j]) > threshold) s.push_back(j);
  return s;
}

std::size_t hamming_distance(const Support& a, const Support& b) {
  Support diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return diff.size();
}

}  // namespace sparselab
