#include <gtest/gtest.h>

#include "sparselab/design.hpp"
#include "sparselab/instance.hpp"
#include "sparselab/rng.hpp"

using namespace sparselab;

namespace {

DesignMatrix small_design() {
  DesignParams dp;
  dp.m = 20;
  dp.p = 30;
  dp.k = 3;
  dp.group_size = 2;
  dp.rho_in = 0.95;
  dp.rho_out_max = 0.3;
  dp.seed = 4;
  return build_design(dp);
}

}  // namespace

TEST(Instance, DegenerateMagnitudeIntervalGivesUnitEntries) {
  const DesignMatrix d = small_design();
  const GroundTruth t = sample_ground_truth(d, 1.0, 1.0, 17);
  for (Index j : t.support) EXPECT_EQ(std::abs(t.w_star[j]), 1.0);
}

TEST(Instance, ZeroOffSupportAndBetaMin) {
  const DesignMatrix d = small_design();
  for (Seed s = 0; s < 20; ++s) {
    const GroundTruth t = sample_ground_truth(d, 0.5, 3.0, s);
    EXPECT_EQ(t.support, d.true_support());
    for (Index j = 0; j < d.cols(); ++j) {
      const bool on = std::binary_search(t.support.begin(), t.support.end(), j);
      if (on) {
        EXPECT_GE(std::abs(t.w_star[j]), 0.5);
        EXPECT_LE(std::abs(t.w_star[j]), 3.0);
      } else {
        EXPECT_EQ(t.w_star[j], 0.0);
      }
    }
    for (std::size_t i = 0; i < t.support.size(); ++i)
      EXPECT_EQ(t.sign_pattern[i], t.w_star[t.support[i]] > 0 ? 1 : -1);
  }
}

TEST(Instance, SeedDeterminism) {
  const DesignMatrix d = small_design();
  EXPECT_EQ(sample_ground_truth(d, 1.0, 2.0, 5).w_star, sample_ground_truth(d, 1.0, 2.0, 5).w_star);
  const GroundTruth t = sample_ground_truth(d, 1.0, 2.0, 5);
  EXPECT_EQ(observe(d, t, 0.3, 9).y, observe(d, t, 0.3, 9).y);
  EXPECT_NE(observe(d, t, 0.3, 9).y, observe(d, t, 0.3, 10).y);
}

TEST(Instance, RejectsBadMagnitudes) {
  const DesignMatrix d = small_design();
  EXPECT_THROW(sample_ground_truth(d, 0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(sample_ground_truth(d, 2.0, 1.0, 1), std::invalid_argument);
  const GroundTruth t = sample_ground_truth(d, 1.0, 1.0, 1);
  EXPECT_THROW(observe(d, t, -0.1, 1), std::invalid_argument);
}

TEST(Instance, NoiselessObservationIsExact) {
  const DesignMatrix d = small_design();
  const GroundTruth t = sample_ground_truth(d, 1.0, 2.0, 2);
  const Observation o = observe(d, t, 0.0, 3);
  const Vector clean = d.columns() * t.w_star;
  EXPECT_LE((o.y - clean).norm(), 1e-12 * clean.norm());
}

TEST(Instance, NoiseSampleVariance) {
  const Vector e = gaussian_noise(10000, 1.0, 42);
  const double mean = e.mean();
  const double var = (e.array() - mean).square().sum() / (e.size() - 1);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Instance, ExpectedNoiseEnergy) {
  double total = 0.0;
  for (Seed s = 0; s < 1000; ++s) total += gaussian_noise(100, 1.0, derive_seed(77, {s})).squaredNorm();
  const double mean = total / 1000.0;
  EXPECT_GE(mean, 90.0);
  EXPECT_LE(mean, 110.0);
}

TEST(Instance, LinearInTruthWithoutNoise) {
  const DesignMatrix d = small_design();
  const GroundTruth t = sample_ground_truth(d, 1.0, 2.0, 8);
  GroundTruth t2 = t;
  t2.w_star *= 2.0;
  const Vector y1 = observe(d, t, 0.0, 0).y;
  const Vector y2 = observe(d, t2, 0.0, 0).y;
  EXPECT_LE((y2 - 2.0 * y1).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Instance, FixedTruth) {
  const DesignMatrix d = small_design();
  const GroundTruth t = fixed_ground_truth(d, 1.5, {1, -1, 1});
  EXPECT_EQ(t.w_star[d.true_support()[1]], -1.5);
  EXPECT_THROW(fixed_ground_truth(d, 1.0, {1, 1}), std::invalid_argument);
  EXPECT_THROW(fixed_ground_truth(d, 1.0, {1, 0, 1}), std::invalid_argument);
}
