#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "mfsb/errors.hpp"

namespace mfsb {

/// Column vector of node values on a SpatialGrid.
using Field = Eigen::VectorXd;
/// Time-indexed trajectory: column l is the slice at t = l * dt.
using FieldPath = Eigen::MatrixXd;

/// Uniform node grid on [x_min, x_max].
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(double x_min, double x_max, Eigen::Index n_x)
      : x_min_(x_min), x_max_(x_max), n_(n_x) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
      throw DomainError("grid bounds must satisfy x_min < x_max");
    if (n_x < 8) throw DomainError("grid needs at least 8 nodes");
    h_ = (x_max - x_min) / static_cast<double>(n_x - 1);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  Eigen::Index size() const { return n_; }
  double h() const { return h_; }
  double node(Eigen::Index i) const { return x_min_ + static_cast<double>(i) * h_; }
  Field nodes() const { return Eigen::VectorXd::LinSpaced(n_, x_min_, x_max_); }

  /// Displacement nodes r_m = (m - (n-1)) h, m = 0 .. 2n-2.
  Field displacements() const {
    Field r(2 * n_ - 1);
    for (Eigen::Index m = 0; m < r.size(); ++m)
      r[m] = static_cast<double>(m - (n_ - 1)) * h_;
    return r;
  }

  bool operator==(const SpatialGrid& o) const {
    return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_;
  }

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  Eigen::Index n_ = 0;
  double h_ = 0.0;
};

/// n_t uniform steps on [0, 1].
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(Eigen::Index n_t) : n_(n_t) {
    if (n_t < 1) throw DomainError("time grid needs at least one step");
    dt_ = 1.0 / static_cast<double>(n_t);
  }
  Eigen::Index steps() const { return n_; }
  Eigen::Index slices() const { return n_ + 1; }
  double dt() const { return dt_; }
  double time(Eigen::Index l) const { return static_cast<double>(l) * dt_; }

  bool operator==(const TimeGrid& o) const { return n_ == o.n_; }

 private:
  Eigen::Index n_ = 0;
  double dt_ = 0.0;
};

inline SpatialGrid make_grid(double x_min, double x_max, Eigen::Index n_x) {
  return SpatialGrid(x_min, x_max, n_x);
}

template <typename Derived>
void require_on_grid(const Eigen::MatrixBase<Derived>& f, const SpatialGrid& g,
                     const char* what = "field") {
  if (f.rows() != g.size())
    throw ShapeError(std::string(what) + " has " + std::to_string(f.rows()) +
                     " rows, grid has " + std::to_string(g.size()) + " nodes");
}

/// Second-order central differences inside, second-order one-sided at the ends.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> gradient(
    const Eigen::MatrixBase<Derived>& f, const SpatialGrid& g) {
  using Scalar = typename Derived::Scalar;
  require_on_grid(f, g);
  const Eigen::Index n = f.rows();
  const Scalar inv2h = Scalar(1) / (Scalar(2) * Scalar(g.h()));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> df(n);
  df(0) = (Scalar(-3) * f(0) + Scalar(4) * f(1) - f(2)) * inv2h;
  for (Eigen::Index i = 1; i + 1 < n; ++i) df(i) = (f(i + 1) - f(i - 1)) * inv2h;
  df(n - 1) = (Scalar(3) * f(n - 1) - Scalar(4) * f(n - 2) + f(n - 3)) * inv2h;
  return df;
}

/// Trapezoid rule with the grid spacing.
template <typename Derived>
typename Derived::Scalar integrate(const Eigen::MatrixBase<Derived>& f, const SpatialGrid& g) {
  using Scalar = typename Derived::Scalar;
  require_on_grid(f, g);
  const Eigen::Index n = f.rows();
  return Scalar(g.h()) * (f.sum() - Scalar(0.5) * (f(0) + f(n - 1)));
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> normalize(
    const Eigen::MatrixBase<Derived>& f, const SpatialGrid& g) {
  const auto mass = integrate(f, g);
  if (!(mass > 0) || !std::isfinite(static_cast<double>(mass)))
    throw ZeroMassError("cannot normalize a field with mass " + std::to_string(mass));
  return f / mass;
}

/// Normalizes every column of a path in place; returns the largest |mass - 1| before scaling.
inline double normalize_slices(FieldPath& path, const SpatialGrid& g) {
  double worst = 0.0;
  for (Eigen::Index l = 0; l < path.cols(); ++l) {
    const double mass = integrate(path.col(l), g);
    if (!(mass > 0) || !std::isfinite(mass))
      throw ZeroMassError("slice " + std::to_string(l) + " has mass " + std::to_string(mass));
    worst = std::max(worst, std::abs(mass - 1.0));
    path.col(l) /= mass;
  }
  return worst;
}

}  // namespace mfsb
