#pragma once

#include <vector>

#include "mfsb/grid.hpp"
#include "mfsb/kolmogorov.hpp"
#include "mfsb/pair_path.hpp"
#include "mfsb/potentials.hpp"

namespace mfsb {

/// Relative floor applied to marginals before the boundary quotients.
inline constexpr double kMarginalFloor = 1e-14;

/// Floors f at kMarginalFloor * max(f) and renormalizes to unit trapezoid mass.
Field floor_marginal(const Field& f, const SpatialGrid& g);

/// Everything the innermost loop holds fixed: the density path, its drift, the reaction
/// profiles evaluated at the previous (phi, phihat), and the boundary exponentials.
struct FrozenProblem {
  SpatialGrid grid;
  TimeGrid time;
  double sigma = 0.0;
  FieldPath p_path;
  FieldPath b_path;
  FieldPath Q_phi_path;
  FieldPath Q_phihat_path;
  Field p_in;
  Field p_fin;
  Field exp_in;   // exp(2 (W * p_in))
  Field exp_fin;  // exp(2 (W * p_fin))
  std::vector<DiscreteGenerator> generators;
};

/// Builds the frozen problem for density path p and reaction pair `pair_j`.
/// An empty pair_j (or a zero potential) gives Q = 0.
FrozenProblem make_frozen_problem(const PotentialTable& table, const FieldPath& p_path,
                                  const PairPath* pair_j, const Field& p_in, const Field& p_fin,
                                  double sigma, const SpatialGrid& g, const TimeGrid& tg);

/// phihat_0 = p_in / phi_0 * exp(2 (W * p_in)).
Field boundary_update_initial(const Field& phi0, const Field& p_in, const Field& expfac);

/// phi_1 = p_fin / phihat_1 * exp(2 (W * p_fin)).
Field boundary_update_final(const Field& phihat1, const Field& p_fin, const Field& expfac);

struct InnerResult {
  PairPath pair;
  int iterations = 0;
  bool converged = false;
  std::vector<double> boundary_dH;  // max of the two boundary distances, per iteration
  double initial_marginal_residual = 0.0;  // max relative error of exp(-2W*p_in) phi_0 phihat_0
  double final_marginal_residual = 0.0;
  double min_phi = 0.0;     // smallest node value of any phi iterate
  double min_phihat = 0.0;  // smallest node value of any phihat iterate
};

/// Alternates backward sweep, initial update, forward sweep and final update until the
/// boundary distance test passes or max_iterations is reached. Not converging is reported
/// through InnerResult::converged; the caller decides whether to continue.
InnerResult inner_sinkhorn(const FrozenProblem& frozen, const PairPath& start, double tol,
                           int max_iterations);

}  // namespace mfsb
