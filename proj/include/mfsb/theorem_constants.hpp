#pragma once

#include <string>

#include "mfsb/errors.hpp"

namespace mfsb {

/// Assumption constants of the density-map contraction bound.
struct DensityMapConstants {
  double beta = 0.0;
  double r = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double W_norm = 0.0;      // sup |Wbar|
  double gradW_norm = 0.0;  // sup |grad Wbar|
  double lapW_norm = 0.0;   // sup |Laplacian Wbar|
};

/// Assumption constants of the reaction-map contraction bound.
struct ReactionMapConstants {
  double beta = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double gradW_norm = 0.0;
};

struct ConstantReport {
  double value = 0.0;
  bool contractive = false;  // value < 1
};

/// lambda = 2 e^(2r+1) [ 2 beta |Wbar| / e
///          + (2 sigma^2 (a1 + a2) beta |grad Wbar| + c1 + c2) / (1 - e sigma^2 beta Z) ],
/// Z = |Lap Wbar| + a3 |grad Wbar|. Requires e sigma^2 beta Z < 1.
ConstantReport density_map_constant(const DensityMapConstants& in, double sigma2);

/// Lambda_p = max{ 2 e m1 sigma^2 beta |grad Wbar| / (1 - e m2),
///                 2 e m3 sigma^2 beta |grad Wbar| / (1 - e m4) }. Requires e m2, e m4 < 1.
ConstantReport reaction_map_constant(const ReactionMapConstants& in, double sigma2);

}  // namespace mfsb
