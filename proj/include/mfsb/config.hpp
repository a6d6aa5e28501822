#pragma once

#include <map>
#include <optional>
#include <string>

#include "mfsb/particles.hpp"
#include "mfsb/solver.hpp"
#include "mfsb/theorem_constants.hpp"

namespace mfsb {

/// Everything a run needs: the solver settings plus the verification knobs.
struct RunConfig {
  SolverConfig solver;
  int verify_N = 100000;
  InteractionMode verify_mode = InteractionMode::automatic;
  // Every key as written in the file (after trimming), sorted; this is the manifest snapshot.
  std::map<std::string, std::string> entries;
};

/// Parses the flat "key = value" format. '#' starts a comment; list values are separated
/// by spaces or commas. Relative file references resolve against base_dir.
///
///   domain = -2 2              n_x = 301        n_t = 100
///   sigma2 = 0.2               theta = 0.7      tol = 1e-6
///   N1 = 200   N2 = 50   N3 = 500               seed = 1
///   potential.type = power_repulsive | gaussian_attractive | tabulated | zero
///   potential.c / .alpha / .eps / .a / .s / .beta / .file
///   potential_is_prescaled = true
///   marginal_in.weights = 0.5 0.5
///   marginal_in.means = 0.5 -0.4
///   marginal_in.variances = 0.04 0.04
///   marginal_in.file = p_in.txt  (two columns x, density; replaces the mixture keys)
///   marginal_fin.* as marginal_in.*
///   verify.N = 100000          verify.mode = auto | pairwise | binned
///
/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Inputs of the two contraction bounds, same key = value format:
///   sigma2, beta, gradW_norm               (shared)
///   r, a1, a2, a3, c1, c2, W_norm, lapW_norm  (density map)
///   m1, m2, m3, m4                          (reaction map)
/// A block is present when all of its own keys are given; at least one must be.
struct ConstantsInput {
  double sigma2 = 0.0;
  std::optional<DensityMapConstants> density;
  std::optional<ReactionMapConstants> reaction;
};
ConstantsInput parse_constants(const std::string& text);
ConstantsInput load_constants(const std::string& path);

}  // namespace mfsb
