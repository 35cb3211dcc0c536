#include "sparselab/instance.hpp"

#include <stdexcept>

#include "sparselab/rng.hpp"

namespace sparselab {

GroundTruth sample_ground_truth(const DesignMatrix& design, double beta_min, double magnitude_max,
                                Seed seed) {
  if (!(beta_min > 0.0 && beta_min <= magnitude_max))
    throw std::invalid_argument("need 0 < beta_min <= magnitude_max");
  Rng rng(seed);
  GroundTruth truth;
  truth.support = design.true_support();
  truth.beta_min = beta_min;
  truth.w_star = Vector::Zero(design.cols());
  for (Index j : truth.support) {
    const int s = rng.sign();
    // uniform_real_distribution(a, a) is undefined, so the degenerate interval is special-cased.
    const double mag = beta_min == magnitude_max ? beta_min : rng.uniform(beta_min, magnitude_max);
    truth.sign_pattern.push_back(s);
    truth.w_star[j] = s * mag;
  }
  return truth;
}

GroundTruth fixed_ground_truth(const DesignMatrix& design, double magnitude,
                               std::vector<int> signs) {
  if (!(magnitude > 0.0)) throw std::invalid_argument("magnitude must be positive");
  if (signs.size() != design.true_support().size())
    throw std::invalid_argument("one sign per support index required");
  GroundTruth truth;
  truth.support = design.true_support();
  truth.beta_min = magnitude;
  truth.w_star = Vector::Zero(design.cols());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
    truth.w_star[truth.support[i]] = signs[i] * magnitude;
  }
  truth.sign_pattern = std::move(signs);
  return truth;
}

Vector gaussian_noise(Index m, double sigma, Seed seed) {
  Rng rng(seed);
  return rng.gaussian(m, sigma);
}

Observation observe(const DesignMatrix& design, const GroundTruth& truth, double sigma,
                    Seed noise_seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  Observation obs;
  obs.sigma = sigma;
  obs.noise_seed = noise_seed;
  obs.y = design.columns() * truth.w_star;
  if (sigma > 0.0) obs.y += gaussian_noise(design.rows(), sigma, noise_seed);
  return obs;
}

}  // namespace sparselab
