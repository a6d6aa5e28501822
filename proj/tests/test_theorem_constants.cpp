#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfsb/theorem_constants.hpp"

using namespace mfsb;

namespace {

DensityMapConstants hand_density() {
  DensityMapConstants d;
  d.beta = 0.01;
  d.r = 0.1;
  d.a1 = d.a2 = d.a3 = 1;
  d.c1 = d.c2 = 0.01;
  d.W_norm = d.gradW_norm = d.lapW_norm = 1;
  return d;
}

ReactionMapConstants hand_reaction() {
  ReactionMapConstants r;
  r.beta = 0.01;
  r.m1 = 0.1;
  r.m2 = 0.2;
  r.m3 = 0.15;
  r.m4 = 0.1;
  r.gradW_norm = 1;
  return r;
}

}  // namespace

TEST_SUITE("theorem_constants") {

TEST_CASE("hand evaluated bounds") {
  // 40-digit evaluation of the closed forms.
  const auto lam = density_map_constant(hand_density(), 0.2);
  CHECK(std::abs(lam.value - 0.2368264838016794276) <= 1e-12);
  CHECK(lam.contractive);
  const auto Lp = reaction_map_constant(hand_reaction(), 0.2);
  CHECK(std::abs(Lp.value - 0.002382662208122975936) <= 1e-12);
  CHECK(Lp.contractive);
}

TEST_CASE("interaction-free limit") {
  auto d = hand_density();
  d.beta = 0;
  CHECK(density_map_constant(d, 0.2).value ==
        doctest::Approx(2 * std::exp(1.2) * 0.02).epsilon(1e-14));
  CHECK(std::abs(density_map_constant(d, 0.2).value - 0.1328046769094618996) <= 1e-12);
  auto r = hand_reaction();
  r.beta = 0;
  CHECK(reaction_map_constant(r, 0.2).value == 0.0);
}

TEST_CASE("preconditions") {
  auto d = hand_density();
  // e sigma2 beta Z = 1 exactly at beta = 1 / (2 e 0.2)
  d.beta = 1.0 / (std::numbers::e * 0.2 * 2.0) * 1.0000001;
  CHECK_THROWS_AS(density_map_constant(d, 0.2), DomainError);
  d.beta = 5;
  CHECK_THROWS_AS(density_map_constant(d, 0.2), DomainError);
  d = hand_density();
  d.r = -1;
  CHECK_THROWS_AS(density_map_constant(d, 0.2), DomainError);
  CHECK_THROWS_AS(density_map_constant(hand_density(), 0.0), DomainError);
  auto r = hand_reaction();
  r.m2 = 0.4;
  CHECK_THROWS_AS(reaction_map_constant(r, 0.2), DomainError);
  r = hand_reaction();
  r.m4 = 1.0 / std::numbers::e;
  CHECK_THROWS_AS(reaction_map_constant(r, 0.2), DomainError);
}

TEST_CASE("large constants are reported as non-contractive") {
  auto d = hand_density();
  d.c1 = d.c2 = 1.0;
  const auto lam = density_map_constant(d, 0.2);
  CHECK(lam.value > 1);
  CHECK_FALSE(lam.contractive);
}

}
