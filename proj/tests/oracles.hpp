#pragma once

// Direct O(n^2) evaluations written straight from the defining sums; the fast paths in
// the library are checked against these.

#include <cmath>

#include "mfsb/grid.hpp"
#include "mfsb/pair_path.hpp"
#include "mfsb/potentials.hpp"

namespace testing {

using mfsb::Field;
using mfsb::FieldPath;

// Q(x_i) = -h sum_j dlog xi(x_j) gradW(x_i - x_j) p(x_j), derivative stencil written out.
inline Field direct_reaction(const mfsb::PotentialTable& t, const Field& xi, const Field& p,
                             const mfsb::SpatialGrid& g) {
  const Eigen::Index n = g.size();
  const double h = g.h();
  Field l = xi.array().log();
  Field d(n);
  d(0) = (-3 * l(0) + 4 * l(1) - l(2)) / (2 * h);
  d(n - 1) = (3 * l(n - 1) - 4 * l(n - 2) + l(n - 3)) / (2 * h);
  for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (l(i + 1) - l(i - 1)) / (2 * h);
  Field q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < n; ++j) s += d(j) * t.gradW(i - j + n - 1) * p(j);
    q(i) = -h * s;
  }
  return q;
}

// exp(-2 h sum_j W(x_i - x_j) p_j) phi_i phihat_i per slice, trapezoid-normalized.
inline FieldPath direct_c_map(const mfsb::PotentialTable& t, const FieldPath& p,
                              const mfsb::PairPath& pair, const mfsb::SpatialGrid& g) {
  const Eigen::Index n = g.size();
  FieldPath c(n, p.cols());
  for (Eigen::Index l = 0; l < p.cols(); ++l) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double conv = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) conv += t.W(i - j + n - 1) * p(j, l);
      c(i, l) = std::exp(-2.0 * g.h() * conv) * pair.phi(i, l) * pair.phihat(i, l);
    }
    double mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mass += (i == 0 || i == n - 1 ? 0.5 : 1.0) * c(i, l);
    c.col(l) /= mass * g.h();
  }
  return c;
}

inline double direct_control_energy(const FieldPath& u, const FieldPath& p,
                                    const mfsb::SpatialGrid& g, const mfsb::TimeGrid& tg) {
  const Eigen::Index n = u.rows(), m = u.cols();
  double s = 0.0;
  for (Eigen::Index l = 0; l < m; ++l)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      const double wt = (l == 0 || l == m - 1) ? 0.5 : 1.0;
      s += wt * wx * 0.5 * u(i, l) * u(i, l) * p(i, l);
    }
  return s * g.h() * tg.dt();
}

}  // namespace testing
