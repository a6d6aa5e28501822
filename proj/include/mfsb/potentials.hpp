#pragma once

#include <string>
#include <utility>

#include "mfsb/grid.hpp"

namespace mfsb {

enum class PotentialKind { zero, power_repulsive, gaussian_attractive, tabulated };

/// Interaction potential W = beta * Wbar for one of the supported families.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  // power_repulsive: Wbar(r) = c / (2 (r^2 + eps^2)^(alpha/2))
  double c = 5.0;
  double alpha = 0.2;
  double eps = 1e-2;
  // gaussian_attractive: Wbar(r) = -a exp(-r^2 / s)
  double a = 1.0;
  double s = 0.3;
  // tabulated: samples of Wbar at displacements (ascending)
  Field table_r;
  Field table_w;
  double beta = 1.0;

  static PotentialSpec none() { return {}; }
  static PotentialSpec power_repulsive(double c, double alpha, double eps, double beta = 1.0);
  static PotentialSpec gaussian_attractive(double a, double s, double beta = 1.0);
  static PotentialSpec tabulated(Field r, Field w, double beta = 1.0);

  bool is_zero() const { return kind == PotentialKind::zero || beta == 0.0; }
};

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// W, grad W and Laplacian of W sampled on the displacement grid of a SpatialGrid.
struct PotentialTable {
  Field W;
  Field gradW;
  Field lapW;
};

/// Analytic tables for the closed-form families; second-order stencils for tabulated input.
PotentialTable eval_potential(const PotentialSpec& spec, const SpatialGrid& g);

/// Two whitespace- or comma-separated numeric columns; '#' comments and non-numeric
/// header lines are skipped.
std::pair<Field, Field> read_two_columns(const std::string& path);

/// Reads a two-column (displacement, value) text file into a tabulated spec.
PotentialSpec load_tabulated_potential(const std::string& path, double beta = 1.0);

/// (kernel * f)(x_i) = h sum_j kernel(x_i - x_j) f(x_j), zero extension outside the grid.
/// Evaluated with an FFT.
Field convolve(const Field& kernel, const Field& f, const SpatialGrid& g);

/// Same sum as convolve, evaluated directly in O(n^2).
Field convolve_direct(const Field& kernel, const Field& f, const SpatialGrid& g);

/// b = -(grad W * p).
Field mean_field_drift(const PotentialTable& table, const Field& p, const SpatialGrid& g);

/// Q(x) = -int grad log xi(y) grad W(x - y) p(y) dy.
Field reaction_term(const PotentialTable& table, const Field& xi, const Field& p,
                    const SpatialGrid& g);

}  // namespace mfsb
