#pragma once

#include <vector>

#include "mfsb/grid.hpp"
#include "mfsb/potentials.hpp"
#include "mfsb/tridiagonal.hpp"

namespace mfsb {

/// Tridiagonal realization of f -> sigma^2 <b, grad f> + (sigma^2 / 2) Laplacian f.
///
/// Advection is upwinded node-wise by the sign of b, so every off-diagonal of A is
/// nonnegative. The Laplacian uses the symmetric zero-flux closure (rows (-1, 1) / h^2 at
/// both ends), which keeps A symmetric when b = 0.
struct DiscreteGenerator {
  Tridiagonal<double> A;
  Field b;
  double sigma = 0.0;
};

DiscreteGenerator build_generator(const Field& b, double sigma, const SpatialGrid& g);

/// One reverse-time step of d_t phi + A phi = sigma^2 Q phi:
/// (I - dt A) phi* = phi_next, then phi = exp(-dt sigma^2 Q) phi*.
Field step_backward(const Field& phi_next, const DiscreteGenerator& gen, const Field& Q, double dt);

/// One forward step of d_t phihat = A phihat - sigma^2 Q phihat with the same splitting.
Field step_forward(const Field& phihat_prev, const DiscreteGenerator& gen, const Field& Q,
                   double dt);

/// Generators for every column of a drift path.
std::vector<DiscreteGenerator> build_generators(const FieldPath& b_path, double sigma,
                                                const SpatialGrid& g);

/// Backward sweep from phi_terminal at t = 1. Step l+1 -> l uses generator and Q of slice l.
FieldPath integrate_backward(const Field& phi_terminal, const std::vector<DiscreteGenerator>& gens,
                             const FieldPath& Q_path, const TimeGrid& tg);
FieldPath integrate_backward(const Field& phi_terminal, const FieldPath& b_path,
                             const FieldPath& Q_path, double sigma, const SpatialGrid& g,
                             const TimeGrid& tg);

/// Forward sweep from phihat_initial at t = 0. Step l -> l+1 uses generator and Q of slice l+1.
FieldPath integrate_forward(const Field& phihat_initial, const std::vector<DiscreteGenerator>& gens,
                            const FieldPath& Q_path, const TimeGrid& tg);
FieldPath integrate_forward(const Field& phihat_initial, const FieldPath& b_path,
                            const FieldPath& Q_path, double sigma, const SpatialGrid& g,
                            const TimeGrid& tg);

struct DensityPropagation {
  FieldPath p;
  double max_mass_drift = 0.0;  // largest per-step |mass change| before renormalization
  double max_cfl = 0.0;         // max |velocity| dt / h over all steps
  int cfl_warnings = 0;         // steps with max_cfl > 1
};

/// McKean-Vlasov density under feedback u:
/// d_t p + div(p (sigma u - sigma^2 grad W * p)) = (sigma^2 / 2) Laplacian p.
///
/// Vertex-centred finite volumes with zero-flux ends, so the conserved quantity is the
/// trapezoid mass. Over each step the control is the mean of its two end slices and the
/// interaction drift comes from the current slice; the exponentially fitted advection and
/// the diffusion are then taken implicitly.
DensityPropagation propagate_density(const Field& p0, const FieldPath& u_path,
                                     const PotentialTable& table, double sigma,
                                     const SpatialGrid& g, const TimeGrid& tg);
DensityPropagation propagate_density(const Field& p0, const FieldPath& u_path,
                                     const PotentialSpec& spec, double sigma, const SpatialGrid& g,
                                     const TimeGrid& tg);

}  // namespace mfsb
