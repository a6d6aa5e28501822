#pragma once

#include "mfsb/grid.hpp"

namespace mfsb {

/// Coupled positive trajectories (phi, phihat); log phi and log phihat are the
/// Hopf-Cole potentials.
struct PairPath {
  FieldPath phi;
  FieldPath phihat;

  Eigen::Index nodes() const { return phi.rows(); }
  Eigen::Index slices() const { return phi.cols(); }
};

/// Leg-wise rescaling (c phi, phihat / c); leaves every reconstructed density unchanged.
inline PairPath rescaled(const PairPath& pair, double c) {
  return {c * pair.phi, pair.phihat / c};
}

}  // namespace mfsb
