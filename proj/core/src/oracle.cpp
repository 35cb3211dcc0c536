#include "sparselab/oracle.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "sparselab/errors.hpp"

namespace sparselab {

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  __extension__ using u128 = unsigned __int128;
  u128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

struct Partial {
  Support best;
  double best_norm = std::numeric_limits<double>::infinity();
  std::size_t enumerated = 0;
  std::size_t skipped = 0;
  std::vector<SubsetScore> table;
};

bool better(double norm, const Support& s, double best_norm, const Support& best) {
  if (norm != best_norm) return norm < best_norm;
  return s < best;
}

// Walks all k-subsets of {0..p-1} in lexicographic order, scoring every
// `stride`-th one starting at `offset`.
Partial scan(const Matrix& A, const Vector& y, Index k, std::size_t offset, std::size_t stride,
             bool table) {
  const Index p = A.cols();
  Partial out;
  Support s(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
  Matrix sub(A.rows(), k);
  std::size_t counter = 0;
  while (true) {
    if (counter % stride == offset) {
      for (Index i = 0; i < k; ++i) sub.col(i) = A.col(s[static_cast<std::size_t>(i)]);
      Eigen::ColPivHouseholderQR<Matrix> qr(sub);
      qr.setThreshold(1e-12);
      ++out.enumerated;
      if (qr.rank() < k) {
        ++out.skipped;
      } else {
        const Vector w = qr.solve(y);
        const double norm = (y - sub * w).norm();
        if (table) out.table.push_back({s, norm});
        if (better(norm, s, out.best_norm, out.best)) {
          out.best_norm = norm;
          out.best = s;
        }
      }
    }
    ++counter;
    // next combination
    Index i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == p - k + i) --i;
    if (i < 0) break;
    ++s[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace

OracleResult best_subset(const DesignMatrix& design, const Observation& obs, Index k_max,
                         bool full_table, unsigned threads) {
  const Index p = design.cols();
  if (k_max < 1 || k_max > std::min(p, design.rows()))
    throw std::invalid_argument("k_max must lie in [1, min(m, p)]");
  const std::uint64_t count =
      binomial(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(k_max));
  if (count > kSubsetBudget)
    throw BudgetExceeded("C(" + std::to_string(p) + ", " + std::to_string(k_max) + ") = " +
                         std::to_string(count) + " exceeds the subset budget of 1e7");

  threads = std::max(1u, threads);
  std::vector<Partial> parts(threads);
  if (threads == 1) {
    parts[0] = scan(design.columns(), obs.y, k_max, 0, 1, full_table);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        parts[t] = scan(design.columns(), obs.y, k_max, t, threads, full_table);
      });
  }

  OracleResult res;
  res.best_residual_norm = std::numeric_limits<double>::infinity();
  for (auto& part : parts) {
    res.enumerated += part.enumerated;
    res.skipped_singular += part.skipped;
    if (!part.best.empty() &&
        better(part.best_norm, part.best, res.best_residual_norm, res.best_support)) {
      res.best_residual_norm = part.best_norm;
      res.best_support = part.best;
    }
    if (full_table)
      res.per_support_table.insert(res.per_support_table.end(), part.table.begin(),
                                   part.table.end());
  }
  if (full_table)
    std::sort(res.per_support_table.begin(), res.per_support_table.end(),
              [](const SubsetScore& a, const SubsetScore& b) { return a.support < b.support; });
  res.coefficients = Vector::Zero(p);
  if (!res.best_support.empty()) {
    Matrix sub(design.rows(), k_max);
    for (Index i = 0; i < k_max; ++i)
      sub.col(i) = design.columns().col(res.best_support[static_cast<std::size_t>(i)]);
    const Vector w = sub.colPivHouseholderQr().solve(obs.y);
    for (Index i = 0; i < k_max; ++i) res.coefficients[res.best_support[static_cast<std::size_t>(i)]] = w[i];
  }
  return res;
}

}  // namespace sparselab
