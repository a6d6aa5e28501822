#include "mfsb/potentials.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <vector>

#include "mfsb/metrics.hpp"

namespace mfsb {

PotentialSpec PotentialSpec::power_repulsive(double c, double alpha, double eps, double beta) {
  PotentialSpec s;
  s.kind = PotentialKind::power_repulsive;
  s.c = c;
  s.alpha = alpha;
  s.eps = eps;
  s.beta = beta;
  return s;
}

PotentialSpec PotentialSpec::gaussian_attractive(double a, double s_width, double beta) {
  PotentialSpec s;
  s.kind = PotentialKind::gaussian_attractive;
  s.a = a;
  s.s = s_width;
  s.beta = beta;
  return s;
}

PotentialSpec PotentialSpec::tabulated(Field r, Field w, double beta) {
  PotentialSpec s;
  s.kind = PotentialKind::tabulated;
  s.table_r = std::move(r);
  s.table_w = std::move(w);
  s.beta = beta;
  return s;
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::zero:
      return "zero";
    case PotentialKind::power_repulsive:
      return "power_repulsive";
    case PotentialKind::gaussian_attractive:
      return "gaussian_attractive";
    case PotentialKind::tabulated:
      return "tabulated";
  }
  return "zero";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "zero") return PotentialKind::zero;
  if (name == "power_repulsive") return PotentialKind::power_repulsive;
  if (name == "gaussian_attractive") return PotentialKind::gaussian_attractive;
  if (name == "tabulated") return PotentialKind::tabulated;
  throw ConfigError("unknown potential type '" + name + "'");
}

namespace {

double interpolate_table(const Field& xs, const Field& ys, double x) {
  const Eigen::Index n = xs.size();
  if (x <= xs(0)) return ys(0);
  if (x >= xs(n - 1)) return ys(n - 1);
  const auto* begin = xs.data();
  const auto* it = std::upper_bound(begin, begin + n, x);
  const Eigen::Index hi = it - begin;
  const Eigen::Index lo = hi - 1;
  const double w = (x - xs(lo)) / (xs(hi) - xs(lo));
  return (1.0 - w) * ys(lo) + w * ys(hi);
}

PotentialTable tabulated_table(const PotentialSpec& spec, const SpatialGrid& g) {
  if (spec.table_r.size() < 3 || spec.table_r.size() != spec.table_w.size())
    throw DomainError("tabulated potential needs at least 3 (r, W) samples");
  for (Eigen::Index i = 1; i < spec.table_r.size(); ++i)
    if (!(spec.table_r(i) > spec.table_r(i - 1)))
      throw DomainError("tabulated potential displacements must be strictly increasing");
  const Field r = g.displacements();
  const Eigen::Index m = r.size();
  Field w(m);
  // A table over r >= 0 is read at |r|; one that spans both signs is symmetrized, so
  // W(r) = W(-r) holds exactly on the displacement grid either way.
  const bool one_sided = spec.table_r(0) >= 0.0;
  for (Eigen::Index k = 0; k < m; ++k)
    w(k) = one_sided ? interpolate_table(spec.table_r, spec.table_w, std::abs(r(k)))
                     : 0.5 * (interpolate_table(spec.table_r, spec.table_w, r(k)) +
                              interpolate_table(spec.table_r, spec.table_w, -r(k)));
  const SpatialGrid dgrid(r(0), r(m - 1), m);
  PotentialTable t;
  t.W = spec.beta * w;
  t.gradW = gradient(t.W, dgrid);
  t.lapW = gradient(t.gradW, dgrid);
  return t;
}

}  // namespace

PotentialTable eval_potential(const PotentialSpec& spec, const SpatialGrid& g) {
  const Field r = g.displacements();
  const Eigen::Index m = r.size();
  PotentialTable t{Field::Zero(m), Field::Zero(m), Field::Zero(m)};
  switch (spec.kind) {
    case PotentialKind::zero:
      return t;
    case PotentialKind::tabulated:
      return tabulated_table(spec, g);
    case PotentialKind::power_repulsive: {
      if (!(spec.eps > 0)) throw DomainError("power_repulsive requires eps > 0");
      if (!(spec.alpha > 0) || !(spec.alpha < 1))
        throw DomainError("power_repulsive requires alpha in (0, 1)");
      const double e2 = spec.eps * spec.eps;
      const double k = spec.beta * spec.c;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double r2 = r(i) * r(i);
        const double q = r2 + e2;
        const double qa = std::pow(q, -0.5 * spec.alpha);
        t.W(i) = 0.5 * k * qa;
        t.gradW(i) = -0.5 * k * spec.alpha * r(i) * qa / q;
        t.lapW(i) = -0.5 * k * spec.alpha * qa / (q * q) * (e2 - (spec.alpha + 1.0) * r2);
      }
      return t;
    }
    case PotentialKind::gaussian_attractive: {
      if (!(spec.s > 0)) throw DomainError("gaussian_attractive requires s > 0");
      const double k = spec.beta * spec.a;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double ex = std::exp(-r(i) * r(i) / spec.s);
        t.W(i) = -k * ex;
        t.gradW(i) = 2.0 * k * r(i) / spec.s * ex;
        t.lapW(i) = 2.0 * k / spec.s * ex * (1.0 - 2.0 * r(i) * r(i) / spec.s);
      }
      return t;
    }
  }
  return t;
}

std::pair<Field, Field> read_two_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path + "'");
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x)) continue;  // blank or header line
    if (!(ss >> y)) throw ConfigError("table '" + path + "': expected two columns");
    xs.push_back(x);
    ys.push_back(y);
  }
  return {Eigen::Map<Field>(xs.data(), Eigen::Index(xs.size())),
          Eigen::Map<Field>(ys.data(), Eigen::Index(ys.size()))};
}

PotentialSpec load_tabulated_potential(const std::string& path, double beta) {
  auto [r, w] = read_two_columns(path);
  return PotentialSpec::tabulated(std::move(r), std::move(w), beta);
}

namespace {

void require_kernel(const Field& kernel, const Field& f, const SpatialGrid& g) {
  require_on_grid(f, g);
  if (kernel.size() != 2 * g.size() - 1)
    throw ShapeError("kernel must have 2*n_x-1 samples, got " + std::to_string(kernel.size()));
}

Eigen::Index fft_size(Eigen::Index at_least) {
  Eigen::Index n = 1;
  while (n < at_least) n <<= 1;
  return n;
}

}  // namespace

Field convolve(const Field& kernel, const Field& f, const SpatialGrid& g) {
  require_kernel(kernel, f, g);
  const Eigen::Index n = g.size();
  const Eigen::Index len = fft_size(3 * n - 2);
  std::vector<double> a(len, 0.0), b(len, 0.0);
  std::copy(kernel.data(), kernel.data() + kernel.size(), a.begin());
  std::copy(f.data(), f.data() + n, b.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> c;
  fft.inv(c, fa);

  Field out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = g.h() * c[std::size_t(i + n - 1)];
  return out;
}

Field convolve_direct(const Field& kernel, const Field& f, const SpatialGrid& g) {
  require_kernel(kernel, f, g);
  const Eigen::Index n = g.size();
  Field out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += kernel(i - j + n - 1) * f(j);
    out(i) = g.h() * s;
  }
  return out;
}

Field mean_field_drift(const PotentialTable& table, const Field& p, const SpatialGrid& g) {
  return -convolve(table.gradW, p, g);
}

Field reaction_term(const PotentialTable& table, const Field& xi, const Field& p,
                    const SpatialGrid& g) {
  require_on_grid(xi, g, "xi");
  require_on_grid(p, g, "p");
  require_positive(xi, "xi");
  const Field dlog = gradient(xi.array().log().matrix(), g);
  return -convolve(table.gradW, p.cwiseProduct(dlog), g);
}

}  // namespace mfsb
