#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfsb/grid.hpp"
#include "mfsb/potentials.hpp"

namespace mfsb {

/// How the interaction drift of the particle system is evaluated.
enum class InteractionMode { automatic, pairwise, binned };

/// Above this many particles the automatic mode bins instead of summing pairs.
inline constexpr int kPairwiseLimit = 5000;
inline constexpr int kRecommendedParticles = 10000;

struct ParticleEnsemble {
  Field positions;
  Eigen::Index step = 0;
  std::uint64_t seed = 0;
  bool pairwise = false;  // which interaction evaluation was used
  std::vector<std::string> warnings;
};

/// Standard normal draw for (seed, particle, step, lane); depends on nothing else, so the
/// result is the same whatever order particles are advanced in.
double counter_normal(std::uint64_t seed, std::uint64_t particle, std::uint64_t step);
/// Uniform draw in (0, 1) from the same counter-based stream.
double counter_uniform(std::uint64_t seed, std::uint64_t particle, std::uint64_t step,
                       std::uint64_t lane);

/// Inverse-CDF samples from a grid density (piecewise linear in each cell).
Field sample_from_density(const Field& p, const SpatialGrid& g, int N, std::uint64_t seed);

/// Euler-Maruyama for dX = (sigma u(X) - sigma^2 (1/N) sum grad W(X - X_j)) dt + sigma dB,
/// reflecting at the ends of the domain. u is linear in space and held at its left
/// endpoint slice over each step.
ParticleEnsemble simulate(const FieldPath& u, const PotentialSpec& spec, double sigma, int N,
                          std::uint64_t seed, const Field& p_in, const SpatialGrid& g,
                          const TimeGrid& tg, InteractionMode mode = InteractionMode::automatic);

/// Cloud-in-cell deposit onto the nodes, normalized to unit trapezoid mass.
Field empirical_density(const ParticleEnsemble& ens, const SpatialGrid& g);

/// L1 distance between the empirical density and p_fin.
double terminal_residual(const ParticleEnsemble& ens, const Field& p_fin, const SpatialGrid& g);

/// Expected L1 size of the sampling error of a plain histogram of N draws from p:
/// sqrt(2 / (pi N h)) * int sqrt(p). Cloud-in-cell deposits come in a little below it.
double monte_carlo_noise(const Field& p, int N, const SpatialGrid& g);

/// One position per line.
void write_samples(const std::string& path, const ParticleEnsemble& ens);
/// Two columns: x, density.
void write_histogram(const std::string& path, const Field& density, const SpatialGrid& g);

}  // namespace mfsb
