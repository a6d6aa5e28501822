#include "mfsb/theorem_constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfsb/errors.hpp"

namespace mfsb {

namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be a finite nonnegative number");
}

}  // namespace

ConstantReport density_map_constant(const DensityMapConstants& in, double sigma2) {
  if (!(sigma2 > 0)) throw DomainError("sigma2 must be positive");
  for (auto [v, name] : {std::pair{in.beta, "beta"}, {in.r, "r"}, {in.a1, "a1"}, {in.a2, "a2"},
                         {in.a3, "a3"}, {in.c1, "c1"}, {in.c2, "c2"}, {in.W_norm, "W_norm"},
                         {in.gradW_norm, "gradW_norm"}, {in.lapW_norm, "lapW_norm"}})
    require_nonnegative(v, name);
  constexpr double e = std::numbers::e;
  const double Z = in.lapW_norm + in.a3 * in.gradW_norm;
  const double guard = e * sigma2 * in.beta * Z;
  if (!(guard < 1.0))
    throw DomainError("e * sigma2 * beta * Z = " + std::to_string(guard) + " must be < 1");
  const double transport =
      (2.0 * sigma2 * (in.a1 + in.a2) * in.beta * in.gradW_norm + in.c1 + in.c2) / (1.0 - guard);
  const double value =
      2.0 * std::exp(2.0 * in.r + 1.0) * (2.0 * in.beta / e * in.W_norm + transport);
  return {value, value < 1.0};
}

ConstantReport reaction_map_constant(const ReactionMapConstants& in, double sigma2) {
  if (!(sigma2 > 0)) throw DomainError("sigma2 must be positive");
  for (auto [v, name] : {std::pair{in.beta, "beta"}, {in.m1, "m1"}, {in.m2, "m2"}, {in.m3, "m3"},
                         {in.m4, "m4"}, {in.gradW_norm, "gradW_norm"}})
    require_nonnegative(v, name);
  constexpr double e = std::numbers::e;
  if (!(e * in.m2 < 1.0)) throw DomainError("e * m2 must be < 1");
  if (!(e * in.m4 < 1.0)) throw DomainError("e * m4 must be < 1");
  const double k = 2.0 * e * sigma2 * in.beta * in.gradW_norm;
  const double value = std::max(k * in.m1 / (1.0 - e * in.m2), k * in.m3 / (1.0 - e * in.m4));
  return {value, value < 1.0};
}

}  // namespace mfsb
