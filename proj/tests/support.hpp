#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "mfsb/grid.hpp"

namespace testing {

inline mfsb::Field gaussian(const mfsb::SpatialGrid& g, double mean, double var) {
  const mfsb::Field x = g.nodes();
  return ((x.array() - mean).square() / (-2.0 * var)).exp() / std::sqrt(2.0 * std::numbers::pi * var);
}

// Positive field with log values spread over [-spread, spread].
inline mfsb::Field random_positive(std::mt19937_64& rng, Eigen::Index n, double spread = 3.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  mfsb::Field f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = std::exp(u(rng));
  return f;
}

inline mfsb::Field random_density(std::mt19937_64& rng, const mfsb::SpatialGrid& g) {
  return mfsb::normalize(random_positive(rng, g.size(), 1.0), g);
}

}  // namespace testing
