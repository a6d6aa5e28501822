#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfsb/errors.hpp"
#include "mfsb/grid.hpp"
#include "mfsb/pair_path.hpp"
#include "mfsb/potentials.hpp"
#include "mfsb/sinkhorn.hpp"

namespace mfsb {

/// Initial or final density: a Gaussian mixture or a tabulated (x, density) curve.
struct MarginalSpec {
  enum class Kind { gaussian_mixture, tabulated };
  Kind kind = Kind::gaussian_mixture;
  std::vector<double> weights{1.0};
  std::vector<double> means{0.0};
  std::vector<double> variances{0.04};
  std::string file;  // tabulated source, kept for provenance
  Field table_x;
  Field table_p;

  static MarginalSpec gaussian(double mean, double variance);
  static MarginalSpec mixture(std::vector<double> weights, std::vector<double> means,
                              std::vector<double> variances);
  void validate(const std::string& name) const;
};

/// Mixture evaluated on the grid, floored and normalized.
Field build_marginals(const MarginalSpec& spec, const SpatialGrid& g);

struct SolverConfig {
  double x_min = -2.0;
  double x_max = 2.0;
  Eigen::Index n_x = 301;
  Eigen::Index n_t = 100;
  double sigma2 = 1.0;
  double theta = 1.0;
  double tol = 1e-6;
  int N1 = 200;
  int N2 = 50;
  int N3 = 500;
  PotentialSpec potential;
  bool potential_is_prescaled = true;
  MarginalSpec marginal_in;
  MarginalSpec marginal_fin;
  std::uint64_t seed = 0;

  double sigma() const;
  SpatialGrid grid() const { return SpatialGrid(x_min, x_max, n_x); }
  TimeGrid time() const { return TimeGrid(n_t); }
  /// The W entering the scaled dynamics: the configured potential, divided by sigma^2
  /// when the configured potential is the unscaled agent-level one.
  PotentialSpec effective_potential() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct InnerRecord {
  int k = 0;
  int j = 0;
  bool converged = false;
  std::vector<double> boundary_dH;
  double initial_marginal_residual = 0.0;
  double final_marginal_residual = 0.0;
};

/// Histories of the three stopping tests and the bookkeeping around them.
struct ConvergenceTrace {
  std::vector<double> outer_dH;       // d_H^S(p^(k+1), p^(k))
  std::vector<double> outer_map_dH;   // d_H^S(C(p^(k)), p^(k))
  std::vector<std::vector<double>> middle_dH;  // per k, d_H^+ of successive pairs
  std::vector<InnerRecord> inner;     // per (k, j)
  std::vector<double> normalization_residuals;  // per k, max |mass - 1| of C(p) before scaling
  InnerRecord init;                   // the interaction-free initialization
  int inner_not_converged = 0;
  int middle_not_converged = 0;
  int outer_increases = 0;
  std::vector<std::string> warnings;
  double min_phi = 0.0;
  double min_phihat = 0.0;
  double min_density = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  int total_inner_iterations = 0;
  std::string status = "not started";
};

struct Solution {
  SpatialGrid grid;
  TimeGrid time;
  Field p_in;
  Field p_fin;
  FieldPath p;
  PairPath pair;
  FieldPath u;
  double cost = 0.0;
  double endpoint_residual_in = 0.0;   // L1(p_0, p_in)
  double endpoint_residual_fin = 0.0;  // L1(p_1, p_fin)
  double wall_seconds = 0.0;
  ConvergenceTrace trace;
};

/// Raised when the outer loop exhausts N1; carries the last iterate and its trace.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Solution partial)
      : Error(what), partial_(std::move(partial)) {}
  const Solution& partial() const { return partial_; }
  const ConvergenceTrace& trace() const { return partial_.trace; }

 private:
  Solution partial_;
};

struct ClassicalInit {
  FieldPath p;
  PairPath pair;
  InnerRecord record;
};

/// Interaction-free Schrodinger bridge between p_in and p_fin, from phi = 1.
ClassicalInit classical_sb_init(const Field& p_in, const Field& p_fin, double sigma,
                                const SpatialGrid& g, const TimeGrid& tg, double tol, int N3);

struct GMapResult {
  PairPath pair;
  InnerResult inner;
};

/// One reaction-update step: freeze Q at pair_j, run the inner loop to its fixed point.
GMapResult g_map(const PotentialTable& table, const FieldPath& p, const PairPath& pair_j,
                 const Field& p_in, const Field& p_fin, double sigma, const SpatialGrid& g,
                 const TimeGrid& tg, double tol, int N3);

/// C(p)_t = exp(-2 W * p_t) phi_t phihat_t, each slice normalized.
FieldPath c_map(const PotentialTable& table, const FieldPath& p, const PairPath& pair,
                const SpatialGrid& g, double* mass_residual = nullptr);

/// theta C(p) + (1 - theta) p.
FieldPath damped_update(const FieldPath& c_of_p, const FieldPath& p, double theta);

/// u_t = sigma grad log phi_t.
FieldPath optimal_control(const PairPath& pair, double sigma, const SpatialGrid& g);

/// Trapezoid in space and time of |u|^2 p / 2.
double control_energy(const FieldPath& u, const FieldPath& p, const SpatialGrid& g,
                      const TimeGrid& tg);

/// Optional warm start for the outer loop (replaces the classical initialization).
struct WarmStart {
  PairPath pair;
};

/// Full nested mean-field Sinkhorn iteration.
Solution solve(const SolverConfig& cfg, const std::optional<WarmStart>& warm = std::nullopt);

enum class LoopLevel { outer, middle, inner };

/// exp of the least-squares slope of log d versus iteration index.
double contraction_rate(const std::vector<double>& distances);
double contraction_rate(const ConvergenceTrace& trace, LoopLevel level);

}  // namespace mfsb
