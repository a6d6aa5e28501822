#include "mfsb/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mfsb/metrics.hpp"

namespace mfsb {

MarginalSpec MarginalSpec::gaussian(double mean, double variance) {
  return mixture({1.0}, {mean}, {variance});
}

MarginalSpec MarginalSpec::mixture(std::vector<double> weights, std::vector<double> means,
                                   std::vector<double> variances) {
  MarginalSpec m;
  m.kind = Kind::gaussian_mixture;
  m.weights = std::move(weights);
  m.means = std::move(means);
  m.variances = std::move(variances);
  return m;
}

void MarginalSpec::validate(const std::string& name) const {
  if (kind == Kind::tabulated) {
    if (table_x.size() < 2 || table_x.size() != table_p.size())
      throw ConfigError(name + ": tabulated marginal needs matching x and density columns");
    if ((table_p.array() < 0).any()) throw ConfigError(name + ": tabulated density is negative");
    return;
  }
  if (weights.empty()) throw ConfigError(name + ".weights: at least one component required");
  if (weights.size() != means.size() || weights.size() != variances.size())
    throw ConfigError(name + ": weights, means and variances must have equal length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0)) throw ConfigError(name + ".weights: every weight must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError(name + ".weights: weights must sum to 1 (got " + std::to_string(total) + ")");
  for (double v : variances)
    if (!(v > 0)) throw ConfigError(name + ".variances: every variance must be positive");
}

Field build_marginals(const MarginalSpec& spec, const SpatialGrid& g) {
  spec.validate("marginal");
  const Field x = g.nodes();
  Field p = Field::Zero(g.size());
  if (spec.kind == MarginalSpec::Kind::gaussian_mixture) {
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
      const double v = spec.variances[k];
      const double scale = spec.weights[k] / std::sqrt(2.0 * std::numbers::pi * v);
      p += (scale * (-(x.array() - spec.means[k]).square() / (2.0 * v)).exp()).matrix();
    }
  } else {
    const Field& tx = spec.table_x;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (x(i) < tx(0) || x(i) > tx(tx.size() - 1)) continue;
      const auto* it = std::upper_bound(tx.data(), tx.data() + tx.size(), x(i));
      Eigen::Index hi = std::min<Eigen::Index>(it - tx.data(), tx.size() - 1);
      const Eigen::Index lo = hi - 1;
      const double w = (x(i) - tx(lo)) / (tx(hi) - tx(lo));
      p(i) = (1.0 - w) * spec.table_p(lo) + w * spec.table_p(hi);
    }
  }
  try {
    return floor_marginal(p, g);
  } catch (const Error& e) {
    throw ConfigError(std::string("marginal: ") + e.what());
  }
}

double SolverConfig::sigma() const { return std::sqrt(sigma2); }

PotentialSpec SolverConfig::effective_potential() const {
  PotentialSpec w = potential;
  if (!potential_is_prescaled) w.beta /= sigma2;
  return w;
}

void SolverConfig::validate() const {
  if (!(x_min < x_max)) throw ConfigError("domain: x_min must be smaller than x_max");
  if (n_x < 8) throw ConfigError("n_x: at least 8 nodes required");
  if (n_t < 1) throw ConfigError("n_t: at least one time step required");
  if (!(sigma2 > 0) || !std::isfinite(sigma2)) throw ConfigError("sigma2: must be positive");
  if (!(theta > 0 && theta <= 1)) throw ConfigError("theta: must lie in (0, 1]");
  if (!(tol > 0)) throw ConfigError("tol: must be positive");
  if (N1 < 1) throw ConfigError("N1: must be at least 1");
  if (N2 < 1) throw ConfigError("N2: must be at least 1");
  if (N3 < 1) throw ConfigError("N3: must be at least 1");
  if (!(potential.beta >= 0)) throw ConfigError("potential.beta: must be nonnegative");
  switch (potential.kind) {
    case PotentialKind::power_repulsive:
      if (!(potential.eps > 0)) throw ConfigError("potential.eps: must be positive");
      if (!(potential.alpha > 0 && potential.alpha < 1))
        throw ConfigError("potential.alpha: must lie in (0, 1)");
      break;
    case PotentialKind::gaussian_attractive:
      if (!(potential.s > 0)) throw ConfigError("potential.s: must be positive");
      break;
    case PotentialKind::tabulated:
      if (potential.table_r.size() < 3) throw ConfigError("potential.file: table too short");
      break;
    case PotentialKind::zero:
      break;
  }
  marginal_in.validate("marginal_in");
  marginal_fin.validate("marginal_fin");
}

namespace {

FieldPath product_density(const PairPath& pair, const SpatialGrid& g) {
  FieldPath p = pair.phi.cwiseProduct(pair.phihat);
  normalize_slices(p, g);
  return p;
}

InnerRecord make_record(int k, int j, const InnerResult& r) {
  return {k, j, r.converged, r.boundary_dH, r.initial_marginal_residual,
          r.final_marginal_residual};
}

}  // namespace

ClassicalInit classical_sb_init(const Field& p_in, const Field& p_fin, double sigma,
                                const SpatialGrid& g, const TimeGrid& tg, double tol, int N3) {
  require_on_grid(p_in, g, "p_in");
  require_on_grid(p_fin, g, "p_fin");
  const Field in = floor_marginal(p_in, g);
  const Field fin = floor_marginal(p_fin, g);
  const PotentialTable none = eval_potential(PotentialSpec::none(), g);
  const FieldPath flat = FieldPath::Ones(g.size(), tg.slices());
  const FrozenProblem frozen = make_frozen_problem(none, flat, nullptr, in, fin, sigma, g, tg);

  PairPath start{flat, flat};
  start.phihat.col(0) = in;
  const InnerResult res = inner_sinkhorn(frozen, start, tol, N3);
  ClassicalInit out{product_density(res.pair, g), res.pair, make_record(-1, -1, res)};
  return out;
}

GMapResult g_map(const PotentialTable& table, const FieldPath& p, const PairPath& pair_j,
                 const Field& p_in, const Field& p_fin, double sigma, const SpatialGrid& g,
                 const TimeGrid& tg, double tol, int N3) {
  const FrozenProblem frozen = make_frozen_problem(table, p, &pair_j, p_in, p_fin, sigma, g, tg);
  GMapResult out;
  out.inner = inner_sinkhorn(frozen, pair_j, tol, N3);
  out.pair = out.inner.pair;
  return out;
}

FieldPath c_map(const PotentialTable& table, const FieldPath& p, const PairPath& pair,
                const SpatialGrid& g, double* mass_residual) {
  if (pair.phi.rows() != p.rows() || pair.phi.cols() != p.cols() ||
      pair.phihat.rows() != p.rows() || pair.phihat.cols() != p.cols())
    throw ShapeError("c_map: pair and density path shapes differ");
  require_positive(pair.phi, "phi");
  require_positive(pair.phihat, "phihat");
  FieldPath c = pair.phi.cwiseProduct(pair.phihat);
  const bool interacting = !table.W.isZero(0.0);
  if (interacting)
    for (Eigen::Index l = 0; l < p.cols(); ++l)
      c.col(l).array() *= (-2.0 * convolve(table.W, p.col(l), g)).array().exp();
  const double worst = normalize_slices(c, g);
  if (mass_residual != nullptr) *mass_residual = worst;
  return c;
}

FieldPath damped_update(const FieldPath& c_of_p, const FieldPath& p, double theta) {
  if (!(theta > 0 && theta <= 1)) throw DomainError("damping theta must lie in (0, 1]");
  if (c_of_p.rows() != p.rows() || c_of_p.cols() != p.cols())
    throw ShapeError("damped_update: path shapes differ");
  if (theta == 1.0) return c_of_p;
  return theta * c_of_p + (1.0 - theta) * p;
}

FieldPath optimal_control(const PairPath& pair, double sigma, const SpatialGrid& g) {
  require_on_grid(pair.phi, g, "phi");
  require_positive(pair.phi, "phi");
  FieldPath u(pair.phi.rows(), pair.phi.cols());
  for (Eigen::Index l = 0; l < u.cols(); ++l)
    u.col(l) = sigma * gradient(pair.phi.col(l).array().log().matrix(), g);
  return u;
}

double control_energy(const FieldPath& u, const FieldPath& p, const SpatialGrid& g,
                      const TimeGrid& tg) {
  if (u.rows() != p.rows() || u.cols() != p.cols()) throw ShapeError("control_energy: shapes differ");
  if (u.cols() != tg.slices()) throw ShapeError("control_energy: path length differs from time grid");
  require_on_grid(u, g, "u");
  Field per_slice(u.cols());
  for (Eigen::Index l = 0; l < u.cols(); ++l)
    per_slice(l) = 0.5 * integrate(u.col(l).cwiseAbs2().cwiseProduct(p.col(l)), g);
  const Eigen::Index m = per_slice.size();
  if (m == 1) return per_slice(0);
  return tg.dt() * (per_slice.sum() - 0.5 * (per_slice(0) + per_slice(m - 1)));
}

Solution solve(const SolverConfig& cfg, const std::optional<WarmStart>& warm) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  const SpatialGrid g = cfg.grid();
  const TimeGrid tg = cfg.time();
  const double sigma = cfg.sigma();
  const PotentialTable table = eval_potential(cfg.effective_potential(), g);

  Solution sol;
  sol.grid = g;
  sol.time = tg;
  sol.p_in = build_marginals(cfg.marginal_in, g);
  sol.p_fin = build_marginals(cfg.marginal_fin, g);
  ConvergenceTrace& trace = sol.trace;

  FieldPath p;
  PairPath pair;
  if (warm) {
    if (warm->pair.phi.rows() != g.size() || warm->pair.phi.cols() != tg.slices())
      throw ShapeError("warm start pair does not match the configured grids");
    require_positive(warm->pair.phi, "warm start phi");
    require_positive(warm->pair.phihat, "warm start phihat");
    pair = warm->pair;
    // The density consistent with a converged pair solves p = C(p) with the pair held
    // fixed; that only needs convolutions, so settle it before the first outer step.
    p = product_density(pair, g);
    for (int it = 0; it < cfg.N1 && !table.W.isZero(0.0); ++it) {
      FieldPath next = damped_update(c_map(table, p, pair, g), p, cfg.theta);
      const double d = path_distance(next, p);
      p = std::move(next);
      if (d < cfg.tol) break;
    }
    trace.init.converged = true;
  } else {
    ClassicalInit init = classical_sb_init(sol.p_in, sol.p_fin, sigma, g, tg, cfg.tol, cfg.N3);
    p = std::move(init.p);
    pair = std::move(init.pair);
    trace.init = init.record;
    trace.total_inner_iterations += int(init.record.boundary_dH.size());
    if (!init.record.converged) {
      ++trace.inner_not_converged;
      trace.warnings.push_back("classical initialization hit N3 before reaching tol");
    }
  }
  trace.min_phi = pair.phi.minCoeff();
  trace.min_phihat = pair.phihat.minCoeff();
  trace.min_density = p.minCoeff();

  for (int k = 0; k < cfg.N1; ++k) {
    PairPath pair_j = pair;
    std::vector<double> middle;
    bool middle_done = false;
    for (int j = 0; j < cfg.N2; ++j) {
      GMapResult step = g_map(table, p, pair_j, sol.p_in, sol.p_fin, sigma, g, tg, cfg.tol, cfg.N3);
      trace.inner.push_back(make_record(k, j, step.inner));
      trace.total_inner_iterations += step.inner.iterations;
      trace.min_phi = std::min(trace.min_phi, step.inner.min_phi);
      trace.min_phihat = std::min(trace.min_phihat, step.inner.min_phihat);
      if (!step.inner.converged) ++trace.inner_not_converged;
      const double d = pair_distance(step.pair, pair_j);
      middle.push_back(d);
      pair_j = std::move(step.pair);
      if (d < cfg.tol) {
        middle_done = true;
        break;
      }
    }
    if (!middle_done) ++trace.middle_not_converged;
    trace.middle_dH.push_back(std::move(middle));
    pair = std::move(pair_j);

    double mass_residual = 0.0;
    const FieldPath c = c_map(table, p, pair, g, &mass_residual);
    trace.normalization_residuals.push_back(mass_residual);
    trace.outer_map_dH.push_back(path_distance(c, p));
    FieldPath next = damped_update(c, p, cfg.theta);
    const double d = path_distance(next, p);
    if (!trace.outer_dH.empty() && d > trace.outer_dH.back()) {
      ++trace.outer_increases;
      trace.warnings.push_back("outer distance increased at k = " + std::to_string(k));
    }
    trace.outer_dH.push_back(d);
    p = std::move(next);
    trace.min_density = std::min(trace.min_density, p.minCoeff());
    trace.outer_iterations = k + 1;
    if (d < cfg.tol) {
      trace.converged = true;
      break;
    }
  }

  sol.p = std::move(p);
  sol.pair = std::move(pair);
  sol.u = optimal_control(sol.pair, sigma, g);
  sol.cost = control_energy(sol.u, sol.p, g, tg);
  sol.endpoint_residual_in = l1_distance(sol.p.col(0), sol.p_in, g);
  sol.endpoint_residual_fin = l1_distance(sol.p.col(tg.steps()), sol.p_fin, g);
  sol.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!trace.converged) {
    trace.status = "no_convergence";
    throw NoConvergence("outer loop did not reach tol within N1 = " + std::to_string(cfg.N1) +
                            " iterations (last d_H^S = " +
                            std::to_string(trace.outer_dH.empty() ? 0.0 : trace.outer_dH.back()) +
                            ")",
                        std::move(sol));
  }
  trace.status = "converged";
  return sol;
}

double contraction_rate(const std::vector<double>& distances) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (distances[i] > 0 && std::isfinite(distances[i])) {
      xs.push_back(double(i));
      ys.push_back(std::log(distances[i]));
    }
  }
  if (xs.size() < 3) throw InsufficientData("contraction_rate needs at least 3 positive distances");
  const double n = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return std::exp(sxy / sxx);
}

double contraction_rate(const ConvergenceTrace& trace, LoopLevel level) {
  switch (level) {
    case LoopLevel::outer:
      return contraction_rate(trace.outer_dH);
    case LoopLevel::middle: {
      const std::vector<double>* best = nullptr;
      for (const auto& seq : trace.middle_dH)
        if (best == nullptr || seq.size() > best->size()) best = &seq;
      if (best == nullptr) throw InsufficientData("trace has no middle-loop history");
      return contraction_rate(*best);
    }
    case LoopLevel::inner: {
      const std::vector<double>* best = &trace.init.boundary_dH;
      for (const auto& rec : trace.inner)
        if (rec.boundary_dH.size() > best->size()) best = &rec.boundary_dH;
      return contraction_rate(*best);
    }
  }
  throw InsufficientData("unknown loop level");
}

}  // namespace mfsb
