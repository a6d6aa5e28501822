#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "mfsb/errors.hpp"

namespace mfsb {

/// Tridiagonal matrix stored by diagonals; lower(0) and upper(n-1) are unused.
template <typename Scalar>
struct Tridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector lower;
  Vector diag;
  Vector upper;

  Tridiagonal() = default;
  explicit Tridiagonal(Eigen::Index n)
      : lower(Vector::Zero(n)), diag(Vector::Zero(n)), upper(Vector::Zero(n)) {}

  Eigen::Index size() const { return diag.size(); }

  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index n = size();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar s = diag(i) * x(i);
      if (i > 0) s += lower(i) * x(i - 1);
      if (i + 1 < n) s += upper(i) * x(i + 1);
      y(i) = s;
    }
    return y;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = diag(i);
      if (i > 0) m(i, i - 1) = lower(i);
      if (i + 1 < n) m(i, i + 1) = upper(i);
    }
    return m;
  }
};

/// Thomas algorithm. No pivoting: intended for diagonally dominant systems.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_tridiagonal(const Tridiagonal<Scalar>& m,
                                                           const Eigen::MatrixBase<Derived>& rhs) {
  const Eigen::Index n = m.size();
  if (rhs.size() != n) throw ShapeError("solve_tridiagonal: rhs size mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n), x(n);
  Scalar denom = m.diag(0);
  if (denom == Scalar(0) || !std::isfinite(static_cast<double>(denom)))
    throw SolveError("solve_tridiagonal: zero pivot at row 0");
  c(0) = m.upper(0) / denom;
  x(0) = rhs(0) / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = m.diag(i) - m.lower(i) * c(i - 1);
    if (denom == Scalar(0) || !std::isfinite(static_cast<double>(denom)))
      throw SolveError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    c(i) = (i + 1 < n) ? m.upper(i) / denom : Scalar(0);
    x(i) = (rhs(i) - m.lower(i) * x(i - 1)) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
  return x;
}

}  // namespace mfsb
