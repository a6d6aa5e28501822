#include "mfsb/sinkhorn.hpp"

#include <algorithm>
#include <cmath>

#include "mfsb/metrics.hpp"

namespace mfsb {

Field floor_marginal(const Field& f, const SpatialGrid& g) {
  require_on_grid(f, g, "marginal");
  const double top = f.maxCoeff();
  if (!(top > 0) || !std::isfinite(top)) throw ZeroMassError("marginal has no positive mass");
  if ((f.array() < 0).any()) throw PositivityError("marginal has negative values");
  return normalize(f.cwiseMax(kMarginalFloor * top), g);
}

FrozenProblem make_frozen_problem(const PotentialTable& table, const FieldPath& p_path,
                                  const PairPath* pair_j, const Field& p_in, const Field& p_fin,
                                  double sigma, const SpatialGrid& g, const TimeGrid& tg) {
  if (p_path.rows() != g.size() || p_path.cols() != tg.slices())
    throw ShapeError("frozen problem: density path does not match the grids");
  require_on_grid(p_in, g, "p_in");
  require_on_grid(p_fin, g, "p_fin");

  FrozenProblem fp;
  fp.grid = g;
  fp.time = tg;
  fp.sigma = sigma;
  fp.p_path = p_path;
  fp.p_in = p_in;
  fp.p_fin = p_fin;
  const Eigen::Index n = g.size();
  const Eigen::Index m = tg.slices();
  fp.b_path = FieldPath::Zero(n, m);
  fp.Q_phi_path = FieldPath::Zero(n, m);
  fp.Q_phihat_path = FieldPath::Zero(n, m);

  const bool interacting = !table.gradW.isZero(0.0) || !table.W.isZero(0.0);
  if (interacting) {
    for (Eigen::Index l = 0; l < m; ++l) fp.b_path.col(l) = mean_field_drift(table, p_path.col(l), g);
    if (pair_j != nullptr && pair_j->phi.size() > 0) {
      if (pair_j->phi.rows() != n || pair_j->phi.cols() != m || pair_j->phihat.rows() != n ||
          pair_j->phihat.cols() != m)
        throw ShapeError("frozen problem: reaction pair does not match the grids");
      for (Eigen::Index l = 0; l < m; ++l) {
        fp.Q_phi_path.col(l) = reaction_term(table, pair_j->phi.col(l), p_path.col(l), g);
        fp.Q_phihat_path.col(l) = reaction_term(table, pair_j->phihat.col(l), p_path.col(l), g);
      }
    }
    fp.exp_in = (2.0 * convolve(table.W, p_in, g)).array().exp();
    fp.exp_fin = (2.0 * convolve(table.W, p_fin, g)).array().exp();
  } else {
    fp.exp_in = Field::Ones(n);
    fp.exp_fin = Field::Ones(n);
  }
  fp.generators = build_generators(fp.b_path, sigma, g);
  return fp;
}

namespace {

Field boundary_quotient(const Field& other, const Field& marginal, const Field& expfac) {
  if (other.size() != marginal.size() || expfac.size() != marginal.size())
    throw ShapeError("boundary update: size mismatch");
  require_positive(other, "boundary potential");
  require_positive(marginal, "marginal");
  require_positive(expfac, "interaction factor");
  return marginal.cwiseQuotient(other).cwiseProduct(expfac);
}

double marginal_residual(const Field& phi, const Field& phihat, const Field& expfac,
                         const Field& marginal) {
  const Field rebuilt = phi.cwiseProduct(phihat).cwiseQuotient(expfac);
  return (rebuilt - marginal).cwiseQuotient(marginal).cwiseAbs().maxCoeff();
}

}  // namespace

Field boundary_update_initial(const Field& phi0, const Field& p_in, const Field& expfac) {
  return boundary_quotient(phi0, p_in, expfac);
}

Field boundary_update_final(const Field& phihat1, const Field& p_fin, const Field& expfac) {
  return boundary_quotient(phihat1, p_fin, expfac);
}

InnerResult inner_sinkhorn(const FrozenProblem& frozen, const PairPath& start, double tol,
                           int max_iterations) {
  if (!(tol > 0)) throw DomainError("inner_sinkhorn requires tol > 0");
  if (max_iterations < 1) throw DomainError("inner_sinkhorn requires at least one iteration");
  const Eigen::Index nt = frozen.time.steps();
  if (start.phi.rows() != frozen.grid.size() || start.phi.cols() != nt + 1 ||
      start.phihat.rows() != frozen.grid.size() || start.phihat.cols() != nt + 1)
    throw ShapeError("inner_sinkhorn: start pair does not match the grids");

  InnerResult res;
  Field phi1 = start.phi.col(nt);
  Field phihat0 = start.phihat.col(0);
  res.min_phi = std::numeric_limits<double>::infinity();
  res.min_phihat = res.min_phi;

  for (int it = 0; it < max_iterations; ++it) {
    FieldPath phi = integrate_backward(phi1, frozen.generators, frozen.Q_phi_path, frozen.time);
    const Field phihat0_next = boundary_update_initial(phi.col(0), frozen.p_in, frozen.exp_in);
    FieldPath phihat =
        integrate_forward(phihat0_next, frozen.generators, frozen.Q_phihat_path, frozen.time);
    const Field phi1_next = boundary_update_final(phihat.col(nt), frozen.p_fin, frozen.exp_fin);

    const double d = std::max(hilbert_distance(phi1_next, phi1).d_H,
                              hilbert_distance(phihat0_next, phihat0).d_H);
    res.boundary_dH.push_back(d);
    res.iterations = it + 1;

    phi.col(nt) = phi1_next;
    res.min_phi = std::min(res.min_phi, phi.minCoeff());
    res.min_phihat = std::min(res.min_phihat, phihat.minCoeff());
    res.pair = {std::move(phi), std::move(phihat)};
    phi1 = phi1_next;
    phihat0 = phihat0_next;
    if (d < tol) {
      res.converged = true;
      break;
    }
  }

  res.initial_marginal_residual = marginal_residual(res.pair.phi.col(0), res.pair.phihat.col(0),
                                                    frozen.exp_in, frozen.p_in);
  res.final_marginal_residual = marginal_residual(res.pair.phi.col(nt), res.pair.phihat.col(nt),
                                                  frozen.exp_fin, frozen.p_fin);
  return res;
}

}  // namespace mfsb
