#include "mfsb/particles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "mfsb/metrics.hpp"

namespace mfsb {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kInitialStep = std::numeric_limits<std::uint64_t>::max();

// Fractional node coordinate of x, clamped to the last cell.
std::pair<Eigen::Index, double> locate(double x, const SpatialGrid& g) {
  const double s = std::clamp((x - g.x_min()) / g.h(), 0.0, double(g.size() - 1));
  const auto a = std::min<Eigen::Index>(Eigen::Index(s), g.size() - 2);
  return {a, s - double(a)};
}

double interpolate(const Eigen::Ref<const Field>& f, double x, const SpatialGrid& g) {
  const auto [a, w] = locate(x, g);
  return (1.0 - w) * f(a) + w * f(a + 1);
}

double reflect(double x, double lo, double hi) {
  const double span = hi - lo;
  // Fold onto [lo, lo + 2 span) then mirror the upper half.
  double y = std::fmod(x - lo, 2.0 * span);
  if (y < 0) y += 2.0 * span;
  if (y > span) y = 2.0 * span - y;
  return std::clamp(lo + y, lo, hi);
}

void write_number(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t particle, std::uint64_t step,
                       std::uint64_t lane) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ particle);
  h = mix(h ^ step);
  h = mix(h ^ lane);
  return (double(h >> 11) + 0.5) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t particle, std::uint64_t step) {
  const double u1 = counter_uniform(seed, particle, step, 0);
  const double u2 = counter_uniform(seed, particle, step, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Field sample_from_density(const Field& p, const SpatialGrid& g, int N, std::uint64_t seed) {
  require_on_grid(p, g, "sampling density");
  if (N < 1) throw DomainError("need at least one sample");
  if ((p.array() < 0).any()) throw PositivityError("sampling density has negative values");
  const Eigen::Index n = g.size();
  const double h = g.h();
  std::vector<double> cdf(std::size_t(n), 0.0);
  for (Eigen::Index i = 1; i < n; ++i)
    cdf[std::size_t(i)] = cdf[std::size_t(i - 1)] + 0.5 * h * (p(i - 1) + p(i));
  const double total = cdf.back();
  if (!(total > 0)) throw ZeroMassError("sampling density has no mass");

  Field x(N);
  for (int k = 0; k < N; ++k) {
    const double target = counter_uniform(seed, std::uint64_t(k), kInitialStep, 2) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    Eigen::Index hi = std::clamp<Eigen::Index>(it - cdf.begin(), 1, n - 1);
    while (hi < n - 1 && cdf[std::size_t(hi)] == cdf[std::size_t(hi - 1)]) ++hi;
    const Eigen::Index a = hi - 1;
    // Density is linear across the cell; invert its quadratic cumulative.
    const double r = target - cdf[std::size_t(a)];
    const double pa = p(a);
    const double slope = (p(a + 1) - pa) / h;
    const double root = std::sqrt(std::max(0.0, pa * pa + 2.0 * slope * r));
    const double s = (pa + root > 0) ? 2.0 * r / (pa + root) : 0.5 * h;
    x(k) = g.node(a) + std::clamp(s, 0.0, h);
  }
  return x;
}

ParticleEnsemble simulate(const FieldPath& u, const PotentialSpec& spec, double sigma, int N,
                          std::uint64_t seed, const Field& p_in, const SpatialGrid& g,
                          const TimeGrid& tg, InteractionMode mode) {
  if (N < 100) throw DomainError("particle simulation needs N >= 100");
  if (!(sigma > 0)) throw DomainError("particle simulation needs sigma > 0");
  if (u.rows() != g.size() || u.cols() != tg.slices())
    throw DomainError("control path is missing or does not match the grids");

  ParticleEnsemble ens;
  ens.seed = seed;
  ens.positions = sample_from_density(p_in, g, N, seed);
  if (N < kRecommendedParticles)
    ens.warnings.push_back("N = " + std::to_string(N) + " is below the recommended " +
                           std::to_string(kRecommendedParticles));

  const PotentialTable table = eval_potential(spec, g);
  const bool interacting = !spec.is_zero();
  ens.pairwise = mode == InteractionMode::pairwise ||
                 (mode == InteractionMode::automatic && N <= kPairwiseLimit);

  const double dt = tg.dt();
  const double sq = sigma * std::sqrt(dt);
  const double s2 = sigma * sigma;
  const Eigen::Index nd = table.gradW.size();
  const double half = double(g.size() - 1);
  Field force(N);
  Field& X = ens.positions;

  for (Eigen::Index l = 0; l < tg.steps(); ++l) {
    force.setZero();
    if (interacting && ens.pairwise) {
      // grad W is odd, so each pair is evaluated once.
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
          const double t = std::clamp((X(i) - X(j)) / g.h() + half, 0.0, double(nd - 1));
          const auto a = std::min<Eigen::Index>(Eigen::Index(t), nd - 2);
          const double w = t - double(a);
          const double gw = (1.0 - w) * table.gradW(a) + w * table.gradW(a + 1);
          force(i) -= gw;
          force(j) += gw;
        }
      force /= double(N);
    } else if (interacting) {
      ens.step = l;
      const Field b = mean_field_drift(table, empirical_density(ens, g), g);
      for (int i = 0; i < N; ++i) force(i) = interpolate(b, X(i), g);
    }
    for (int i = 0; i < N; ++i) {
      const double drift = sigma * interpolate(u.col(l), X(i), g) + s2 * force(i);
      const double next = X(i) + drift * dt + sq * counter_normal(seed, std::uint64_t(i),
                                                                   std::uint64_t(l));
      X(i) = reflect(next, g.x_min(), g.x_max());
    }
  }
  ens.step = tg.steps();
  return ens;
}

Field empirical_density(const ParticleEnsemble& ens, const SpatialGrid& g) {
  const Eigen::Index n = g.size();
  if (ens.positions.size() == 0) throw DomainError("empty ensemble");
  Field rho = Field::Zero(n);
  for (Eigen::Index k = 0; k < ens.positions.size(); ++k) {
    const auto [a, w] = locate(ens.positions(k), g);
    rho(a) += 1.0 - w;
    rho(a + 1) += w;
  }
  Field weight = Field::Constant(n, g.h());
  weight(0) = weight(n - 1) = 0.5 * g.h();
  return rho.cwiseQuotient(weight) / double(ens.positions.size());
}

double terminal_residual(const ParticleEnsemble& ens, const Field& p_fin, const SpatialGrid& g) {
  return l1_distance(empirical_density(ens, g), p_fin, g);
}

double monte_carlo_noise(const Field& p, int N, const SpatialGrid& g) {
  require_on_grid(p, g, "density");
  if (N < 1) throw DomainError("need at least one sample");
  return std::sqrt(2.0 / (std::numbers::pi * N * g.h())) * integrate(p.cwiseMax(0.0).cwiseSqrt(), g);
}

void write_samples(const std::string& path, const ParticleEnsemble& ens) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  std::fputs("x\n", f);
  for (Eigen::Index k = 0; k < ens.positions.size(); ++k) {
    write_number(f, ens.positions(k));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

void write_histogram(const std::string& path, const Field& density, const SpatialGrid& g) {
  require_on_grid(density, g, "histogram");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  std::fputs("x,density\n", f);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    write_number(f, g.node(i));
    std::fputc(',', f);
    write_number(f, density(i));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace mfsb
