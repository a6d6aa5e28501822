#pragma once

// Randomized checks of the Hilbert-metric inequalities. Each returns the number of
// violations beyond the slack; shared by the unit tests and the acceptance run.

#include <cmath>
#include <random>

#include "mfsb/metrics.hpp"
#include "support.hpp"

namespace testing {

inline constexpr double kMetricSlack = 1e-10;

struct MetricTrial {
  std::mt19937_64 rng;
  explicit MetricTrial(std::uint64_t seed) : rng(seed) {}
  Eigen::Index size() { return std::uniform_int_distribution<Eigen::Index>(8, 128)(rng); }
  double spread() { return std::uniform_real_distribution<double>(0.01, 20.0)(rng); }
  mfsb::Field field(Eigen::Index n) { return random_positive(rng, n, spread()); }
};

inline int projectivity_violations(int trials, std::uint64_t seed) {
  MetricTrial t(seed);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const mfsb::Field f = t.field(t.size());
    const double c = std::exp(std::uniform_real_distribution<double>(-30, 30)(t.rng));
    if (mfsb::hilbert_distance(mfsb::Field(c * f), f).d_H > kMetricSlack) ++bad;
  }
  return bad;
}

inline int symmetry_violations(int trials, std::uint64_t seed) {
  MetricTrial t(seed);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const auto n = t.size();
    const mfsb::Field f = t.field(n), g = t.field(n);
    if (std::abs(mfsb::hilbert_distance(f, g).d_H - mfsb::hilbert_distance(g, f).d_H) >
        kMetricSlack)
      ++bad;
  }
  return bad;
}

inline int triangle_violations(int trials, std::uint64_t seed) {
  MetricTrial t(seed);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const auto n = t.size();
    const mfsb::Field f = t.field(n), g = t.field(n), h = t.field(n);
    const double lhs = mfsb::hilbert_distance(f, h).d_H;
    const double rhs = mfsb::hilbert_distance(f, g).d_H + mfsb::hilbert_distance(g, h).d_H;
    if (lhs > rhs + kMetricSlack) ++bad;
  }
  return bad;
}

inline int product_violations(int trials, std::uint64_t seed) {
  MetricTrial t(seed);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const auto n = t.size();
    const mfsb::Field f1 = t.field(n), f2 = t.field(n), g1 = t.field(n), g2 = t.field(n);
    const double lhs =
        mfsb::hilbert_distance(mfsb::Field(f1.cwiseProduct(f2)), mfsb::Field(g1.cwiseProduct(g2))).d_H;
    const double rhs = mfsb::hilbert_distance(f1, g1).d_H + mfsb::hilbert_distance(f2, g2).d_H;
    if (lhs > rhs + kMetricSlack) ++bad;
  }
  return bad;
}

inline int log_sup_violations(int trials, std::uint64_t seed) {
  MetricTrial t(seed);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const auto n = t.size();
    const mfsb::Field f = t.field(n), g = t.field(n);
    const double sup = (f.array().log() - g.array().log()).abs().maxCoeff();
    if (mfsb::hilbert_distance(f, g).d_H > 2.0 * sup + kMetricSlack) ++bad;
  }
  return bad;
}

inline int l1_bound_violations(int trials, std::uint64_t seed) {
  MetricTrial t(seed);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const auto n = t.size();
    const mfsb::SpatialGrid grid(-1.0, 1.0 + double(k % 7), n);
    // Moderate spreads keep e^d - 1 informative.
    const mfsb::Field f = mfsb::normalize(random_positive(t.rng, n, 0.5 + 0.01 * (k % 100)), grid);
    const mfsb::Field g = mfsb::normalize(random_positive(t.rng, n, 0.5), grid);
    const double d = mfsb::hilbert_distance(f, g).d_H;
    if (mfsb::l1_distance(f, g, grid) > std::expm1(d) + kMetricSlack) ++bad;
  }
  return bad;
}

}  // namespace testing
