#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sparselab/design.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/instance.hpp"
#include "sparselab/oracle.hpp"

using namespace sparselab;

namespace {

DesignMatrix design(Index m, Index p, Index k, Index gs, double rho, double rho_out, Seed seed) {
  DesignParams dp;
  dp.m = m;
  dp.p = p;
  dp.k = k;
  dp.group_size = gs;
  dp.rho_in = rho;
  dp.rho_out_max = rho_out;
  dp.seed = seed;
  return build_design(dp);
}

double ls_residual(const Matrix& a, const Support& s, const Vector& y) {
  Matrix as(a.rows(), static_cast<Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) as.col(static_cast<Index>(i)) = a.col(s[i]);
  const Vector w = as.colPivHouseholderQr().solve(y);
  return (y - as * w).norm();
}

}  // namespace

TEST(Oracle, Binomial) {
  EXPECT_EQ(binomial(6, 2), 15u);
  EXPECT_EQ(binomial(200, 5), 2535650040u);
  EXPECT_EQ(binomial(5, 7), 0u);
  EXPECT_EQ(binomial(10000, 5000), UINT64_MAX);
}

TEST(Oracle, OrthogonalDesignFindsTruth) {
  const DesignMatrix d = identity_design(6, {1, 4});
  const Observation o = observe(d, fixed_ground_truth(d, 1.0, {1, -1}), 0.0, 0);
  const OracleResult r = best_subset(d, o, 2);
  EXPECT_EQ(r.best_support, d.true_support());
  EXPECT_NEAR(r.best_residual_norm, 0.0, 1e-12);
  EXPECT_NEAR(r.coefficients[1], 1.0, 1e-12);
  EXPECT_NEAR(r.coefficients[4], -1.0, 1e-12);
}

TEST(Oracle, FullTableMatchesBruteForce) {
  const DesignMatrix d = design(8, 6, 2, 1, 0.9, 0.5, 3);
  const Observation o = observe(d, sample_ground_truth(d, 1, 2, 4), 0.3, 5);
  const OracleResult r = best_subset(d, o, 2, true);
  ASSERT_EQ(r.per_support_table.size(), 15u);
  EXPECT_EQ(r.enumerated, 15u);
  double lo = INFINITY;
  for (const auto& row : r.per_support_table) {
    EXPECT_NEAR(row.residual_norm, ls_residual(d.columns(), row.support, o.y), 1e-10);
    lo = std::min(lo, row.residual_norm);
  }
  EXPECT_EQ(r.best_residual_norm, lo);
  EXPECT_TRUE(best_subset(d, o, 2).per_support_table.empty());
}

TEST(Oracle, ResidualNeverAboveTruthSupport) {
  for (Seed s = 0; s < 10; ++s) {
    const DesignMatrix d = design(12, 10, 2, 2, 0.95, 0.3, s);
    const Observation o = observe(d, sample_ground_truth(d, 1, 2, s), 0.5, s + 1);
    const OracleResult r = best_subset(d, o, 2);
    EXPECT_LE(r.best_residual_norm, ls_residual(d.columns(), d.true_support(), o.y) + 1e-12);
  }
}

TEST(Oracle, ThreadCountDoesNotChangeAnswer) {
  const DesignMatrix d = design(20, 16, 3, 2, 0.95, 0.3, 7);
  const Observation o = observe(d, sample_ground_truth(d, 1, 2, 8), 0.4, 9);
  const OracleResult one = best_subset(d, o, 3, true, 1);
  for (unsigned t : {2u, 3u, 5u}) {
    const OracleResult many = best_subset(d, o, 3, true, t);
    EXPECT_EQ(many.best_support, one.best_support);
    EXPECT_EQ(many.best_residual_norm, one.best_residual_norm);
    EXPECT_EQ(many.enumerated, one.enumerated);
    ASSERT_EQ(many.per_support_table.size(), one.per_support_table.size());
    for (std::size_t i = 0; i < one.per_support_table.size(); ++i)
      EXPECT_EQ(many.per_support_table[i].support, one.per_support_table[i].support);
  }
}

TEST(Oracle, Budget) {
  const DesignMatrix d = design(100, 200, 5, 3, 0.95, 0.3, 1);
  Observation o;
  o.y = Vector::Ones(100);
  EXPECT_THROW(best_subset(d, o, 5), BudgetExceeded);
  EXPECT_THROW(best_subset(d, o, 0), std::invalid_argument);
}

TEST(Oracle, DependentSubsetsSkipped) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a.col(2) = a.col(0);
  const DesignMatrix d(a, {0}, {{0, {2}}}, DesignParams{});
  Observation o;
  o.y = Vector::Zero(3);
  o.y << 1.0, 1.0, 0.5;
  const OracleResult r = best_subset(d, o, 2);
  EXPECT_EQ(r.skipped_singular, 1u);
  EXPECT_EQ(r.enumerated, 3u);
  EXPECT_EQ(r.best_support, (Support{0, 1}));
}

TEST(Oracle, TiesGoToLexicographicallySmallest) {
  const DesignMatrix d = identity_design(4, {0});
  Observation o;
  o.y = Vector::Ones(4);
  const OracleResult r = best_subset(d, o, 2);
  EXPECT_EQ(r.best_support, (Support{0, 1}));
  EXPECT_EQ(best_subset(d, o, 2, false, 3).best_support, (Support{0, 1}));
}
