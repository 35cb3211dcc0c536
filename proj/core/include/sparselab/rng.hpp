#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "sparselab/types.hpp"

namespace sparselab {

/// splitmix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic child seed for a (parent, tag...) path, e.g. (master, cell, trial).
constexpr Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> path) noexcept {
  Seed s = mix64(parent);
  for (auto tag : path) s = mix64(s ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return s;
}

class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int sign() { return std::bernoulli_distribution(0.5)(engine_) ? 1 : -1; }

  Vector gaussian(Index n, double scale = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
  }

  Vector unit_vector(Index n) {
    Vector v = gaussian(n);
    double nrm = v.norm();
    while (nrm == 0.0) {
      v = gaussian(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sparselab
