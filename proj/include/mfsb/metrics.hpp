#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "mfsb/errors.hpp"
#include "mfsb/grid.hpp"
#include "mfsb/pair_path.hpp"

namespace mfsb {

struct MetricReport {
  double d_H = 0.0;
  Eigen::Index argmax_node = 0;  // node attaining sup f/g
  Eigen::Index argmin_node = 0;  // node attaining inf f/g
};

template <typename Derived>
void require_positive(const Eigen::MatrixBase<Derived>& f, const char* what) {
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const auto v = f.derived().coeff(i);
    if (!(v > 0) || !std::isfinite(static_cast<double>(v)))
      throw PositivityError(std::string(what) + " is not strictly positive at index " +
                            std::to_string(i));
  }
}

/// Hilbert projective distance; ratios are formed in log space.
template <typename DerivedF, typename DerivedG>
MetricReport hilbert_distance(const Eigen::MatrixBase<DerivedF>& f,
                              const Eigen::MatrixBase<DerivedG>& g) {
  if (f.size() != g.size()) throw ShapeError("hilbert_distance: size mismatch");
  if (f.size() == 0) throw ShapeError("hilbert_distance: empty field");
  require_positive(f, "f");
  require_positive(g, "g");
  MetricReport rep;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double r = std::log(static_cast<double>(f.derived().coeff(i))) -
                     std::log(static_cast<double>(g.derived().coeff(i)));
    if (r > hi) {
      hi = r;
      rep.argmax_node = i;
    }
    if (r < lo) {
      lo = r;
      rep.argmin_node = i;
    }
  }
  rep.d_H = hi - lo;
  return rep;
}

/// Supremum over time slices of the slice-wise Hilbert distance.
template <typename DerivedP, typename DerivedQ>
double path_distance(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw ShapeError("path_distance: paths live on different grids");
  double sup = 0.0;
  for (Eigen::Index l = 0; l < p.cols(); ++l)
    sup = std::max(sup, hilbert_distance(p.col(l), q.col(l)).d_H);
  return sup;
}

/// Larger of the two leg-wise path distances.
inline double pair_distance(const PairPath& a, const PairPath& b) {
  return std::max(path_distance(a.phi, b.phi), path_distance(a.phihat, b.phihat));
}

/// Trapezoid integral of |f - g|.
template <typename DerivedF, typename DerivedG>
double l1_distance(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
                   const SpatialGrid& grid) {
  if (f.size() != g.size()) throw ShapeError("l1_distance: size mismatch");
  return integrate((f - g).cwiseAbs(), grid);
}

}  // namespace mfsb
