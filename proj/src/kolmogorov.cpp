#include "mfsb/kolmogorov.hpp"

#include <algorithm>
#include <cmath>

#include "mfsb/metrics.hpp"

namespace mfsb {

DiscreteGenerator build_generator(const Field& b, double sigma, const SpatialGrid& g) {
  if (!(sigma > 0)) throw DomainError("generator requires sigma > 0");
  require_on_grid(b, g, "drift");
  const Eigen::Index n = g.size();
  const double h = g.h();
  const double s2 = sigma * sigma;
  const double diff = 0.5 * s2 / (h * h);

  DiscreteGenerator gen{Tridiagonal<double>(n), b, sigma};
  auto& A = gen.A;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) {
      A.lower(i) += diff;
      A.diag(i) -= diff;
    }
    if (i + 1 < n) {
      A.upper(i) += diff;
      A.diag(i) -= diff;
    }
    const double c = s2 * b(i) / h;
    if (c > 0 && i + 1 < n) {
      A.upper(i) += c;
      A.diag(i) -= c;
    } else if (c < 0 && i > 0) {
      A.lower(i) -= c;
      A.diag(i) += c;
    }
  }
  return gen;
}

namespace {

Field implicit_solve(const Field& rhs, const Tridiagonal<double>& A, double dt) {
  Tridiagonal<double> m(A.size());
  m.lower = -dt * A.lower;
  m.upper = -dt * A.upper;
  m.diag = Field::Ones(A.size()) - dt * A.diag;
  return solve_tridiagonal(m, rhs);
}

Field split_step(const Field& in, const DiscreteGenerator& gen, const Field& Q, double dt) {
  if (in.size() != gen.A.size() || Q.size() != in.size())
    throw ShapeError("kolmogorov step: field, generator and Q sizes differ");
  require_positive(in, "kolmogorov step input");
  const Field star = implicit_solve(in, gen.A, dt);
  const double s2 = gen.sigma * gen.sigma;
  Field out = star.cwiseProduct((-dt * s2 * Q).array().exp().matrix());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (!(out(i) > 0) || !std::isfinite(out(i)))
      throw PositivityError("kolmogorov step produced a nonpositive value at node " +
                            std::to_string(i));
  return out;
}

}  // namespace

Field step_backward(const Field& phi_next, const DiscreteGenerator& gen, const Field& Q,
                    double dt) {
  return split_step(phi_next, gen, Q, dt);
}

Field step_forward(const Field& phihat_prev, const DiscreteGenerator& gen, const Field& Q,
                   double dt) {
  return split_step(phihat_prev, gen, Q, dt);
}

std::vector<DiscreteGenerator> build_generators(const FieldPath& b_path, double sigma,
                                                const SpatialGrid& g) {
  std::vector<DiscreteGenerator> gens;
  gens.reserve(std::size_t(b_path.cols()));
  for (Eigen::Index l = 0; l < b_path.cols(); ++l)
    gens.push_back(build_generator(b_path.col(l), sigma, g));
  return gens;
}

namespace {

void require_sweep_shapes(const Field& start, const std::vector<DiscreteGenerator>& gens,
                          const FieldPath& Q_path, const TimeGrid& tg) {
  const auto slices = tg.slices();
  if (Eigen::Index(gens.size()) != slices || Q_path.cols() != slices)
    throw ShapeError("sweep needs n_t + 1 generator and Q slices");
  if (Q_path.rows() != start.size()) throw ShapeError("sweep: Q path rows differ from field");
}

}  // namespace

FieldPath integrate_backward(const Field& phi_terminal, const std::vector<DiscreteGenerator>& gens,
                             const FieldPath& Q_path, const TimeGrid& tg) {
  require_sweep_shapes(phi_terminal, gens, Q_path, tg);
  const Eigen::Index nt = tg.steps();
  FieldPath path(phi_terminal.size(), nt + 1);
  path.col(nt) = phi_terminal;
  for (Eigen::Index l = nt - 1; l >= 0; --l)
    path.col(l) = step_backward(path.col(l + 1), gens[std::size_t(l)], Q_path.col(l), tg.dt());
  return path;
}

FieldPath integrate_backward(const Field& phi_terminal, const FieldPath& b_path,
                             const FieldPath& Q_path, double sigma, const SpatialGrid& g,
                             const TimeGrid& tg) {
  return integrate_backward(phi_terminal, build_generators(b_path, sigma, g), Q_path, tg);
}

FieldPath integrate_forward(const Field& phihat_initial, const std::vector<DiscreteGenerator>& gens,
                            const FieldPath& Q_path, const TimeGrid& tg) {
  require_sweep_shapes(phihat_initial, gens, Q_path, tg);
  const Eigen::Index nt = tg.steps();
  FieldPath path(phihat_initial.size(), nt + 1);
  path.col(0) = phihat_initial;
  for (Eigen::Index l = 1; l <= nt; ++l)
    path.col(l) = step_forward(path.col(l - 1), gens[std::size_t(l)], Q_path.col(l), tg.dt());
  return path;
}

FieldPath integrate_forward(const Field& phihat_initial, const FieldPath& b_path,
                            const FieldPath& Q_path, double sigma, const SpatialGrid& g,
                            const TimeGrid& tg) {
  return integrate_forward(phihat_initial, build_generators(b_path, sigma, g), Q_path, tg);
}

namespace {

// B(z) = z / (e^z - 1), continuous at 0.
double bernoulli(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
  return z / std::expm1(z);
}

}  // namespace

DensityPropagation propagate_density(const Field& p0, const FieldPath& u_path,
                                     const PotentialTable& table, double sigma,
                                     const SpatialGrid& g, const TimeGrid& tg) {
  if (!(sigma > 0)) throw DomainError("propagate_density requires sigma > 0");
  require_on_grid(p0, g, "p0");
  if (u_path.rows() != g.size() || u_path.cols() != tg.slices())
    throw ShapeError("propagate_density: control path shape does not match the grids");

  const Eigen::Index n = g.size();
  const double h = g.h();
  const double dt = tg.dt();
  const double s2 = sigma * sigma;
  const double diff = 0.5 * s2 / h;
  Field weight = Field::Constant(n, h);
  weight(0) = weight(n - 1) = 0.5 * h;

  DensityPropagation out;
  out.p.resize(n, tg.slices());
  out.p.col(0) = normalize(p0, g);

  for (Eigen::Index l = 0; l < tg.steps(); ++l) {
    const Field cur = out.p.col(l);
    // Control averaged over the step (trapezoid in time); the interaction drift is taken
    // from the slice already known.
    const Field v = 0.5 * sigma * (u_path.col(l) + u_path.col(l + 1)) +
                    s2 * mean_field_drift(table, cur, g);
    out.max_cfl = std::max(out.max_cfl, v.cwiseAbs().maxCoeff() * dt / h);
    if (v.cwiseAbs().maxCoeff() * dt / h > 1.0) ++out.cfl_warnings;

    Tridiagonal<double> m(n);
    m.diag = weight / dt;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      // Exponentially fitted flux through the face between nodes i and i+1:
      // F = diff (B(-z) p_i - B(z) p_{i+1}), z = a h / (sigma^2 / 2).
      const double a = 0.5 * (v(i) + v(i + 1));
      const double z = a * h / (0.5 * s2);
      const double fwd = diff * bernoulli(-z);
      const double bwd = diff * bernoulli(z);
      m.diag(i) += fwd;
      m.upper(i) -= bwd;
      m.diag(i + 1) += bwd;
      m.lower(i + 1) -= fwd;
    }
    Field next = solve_tridiagonal(m, Field(weight.cwiseProduct(cur) / dt));
    const double before = integrate(cur, g);
    const double after = integrate(next, g);
    out.max_mass_drift = std::max(out.max_mass_drift, std::abs(after - before));
    out.p.col(l + 1) = next / after;
  }
  return out;
}

DensityPropagation propagate_density(const Field& p0, const FieldPath& u_path,
                                     const PotentialSpec& spec, double sigma, const SpatialGrid& g,
                                     const TimeGrid& tg) {
  return propagate_density(p0, u_path, eval_potential(spec, g), sigma, g, tg);
}

}  // namespace mfsb
