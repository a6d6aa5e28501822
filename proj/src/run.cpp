#include "mfsb/run.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfsb/kolmogorov.hpp"
#include "mfsb/metrics.hpp"
#include "mfsb/particles.hpp"

namespace mfsb {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct File {
  explicit File(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
    if (!f) throw IoError("cannot write " + path);
  }
  ~File() { std::fclose(f); }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
  std::FILE* f;
};

void put(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

ordered_json rate_or_null(const ConvergenceTrace& t, LoopLevel level) {
  try {
    return contraction_rate(t, level);
  } catch (const InsufficientData&) {
    return nullptr;
  }
}

ordered_json record_json(const InnerRecord& r) {
  return {{"k", r.k},
          {"j", r.j},
          {"converged", r.converged},
          {"iterations", r.boundary_dH.size()},
          {"boundary_dH", r.boundary_dH},
          {"initial_marginal_residual", r.initial_marginal_residual},
          {"final_marginal_residual", r.final_marginal_residual}};
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

const char* mode_name(bool pairwise) { return pairwise ? "pairwise" : "binned"; }

}  // namespace

void write_path_csv(const std::string& path, const char* column, const FieldPath& f,
                    const SpatialGrid& g, const TimeGrid& tg) {
  if (f.rows() != g.size() || f.cols() != tg.slices())
    throw ShapeError(std::string(column) + " path does not match the grids");
  File out(path);
  std::fprintf(out.f, "t,x,%s\n", column);
  for (Eigen::Index l = 0; l < f.cols(); ++l)
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      put(out.f, tg.time(l));
      std::fputc(',', out.f);
      put(out.f, g.node(i));
      std::fputc(',', out.f);
      put(out.f, f(i, l));
      std::fputc('\n', out.f);
    }
}

void write_pair_csv(const std::string& path, const PairPath& pair, const SpatialGrid& g,
                    const TimeGrid& tg) {
  if (pair.phi.rows() != g.size() || pair.phi.cols() != tg.slices() ||
      pair.phihat.rows() != g.size() || pair.phihat.cols() != tg.slices())
    throw ShapeError("pair does not match the grids");
  File out(path);
  std::fputs("t,x,phi,phihat\n", out.f);
  for (Eigen::Index l = 0; l < tg.slices(); ++l)
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      put(out.f, tg.time(l));
      std::fputc(',', out.f);
      put(out.f, g.node(i));
      std::fputc(',', out.f);
      put(out.f, pair.phi(i, l));
      std::fputc(',', out.f);
      put(out.f, pair.phihat(i, l));
      std::fputc('\n', out.f);
    }
}

PairPath read_pair_csv(const std::string& path, const SpatialGrid& g, const TimeGrid& tg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read warm start '" + path + "'");
  PairPath pair{FieldPath(g.size(), tg.slices()), FieldPath(g.size(), tg.slices())};
  const Eigen::Index total = g.size() * tg.slices();
  Eigen::Index row = 0;
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,x,phi,phihat", 0) != 0)
    throw ConfigError("warm start '" + path + "': missing t,x,phi,phihat header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    double t, x, phi, phihat;
    if (!(ss >> t >> x >> phi >> phihat))
      throw ConfigError("warm start '" + path + "': malformed row " + std::to_string(row + 1));
    if (row >= total) throw ConfigError("warm start '" + path + "': more rows than the grids hold");
    const Eigen::Index l = row / g.size();
    const Eigen::Index i = row % g.size();
    if (std::abs(t - tg.time(l)) > 1e-9 || std::abs(x - g.node(i)) > 1e-9 * (1.0 + std::abs(x)))
      throw ConfigError("warm start '" + path + "': grid does not match the config at row " +
                        std::to_string(row + 1));
    pair.phi(i, l) = phi;
    pair.phihat(i, l) = phihat;
    ++row;
  }
  if (row != total) throw ConfigError("warm start '" + path + "': fewer rows than the grids hold");
  return pair;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char two[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(two, sizeof two, "%02x", md[k]);
    hex += two;
  }
  return hex;
}

ordered_json trace_json(const Solution& sol) {
  const ConvergenceTrace& t = sol.trace;
  ordered_json inner = ordered_json::array();
  for (const auto& r : t.inner) inner.push_back(record_json(r));
  int per_record = int(t.init.boundary_dH.size());
  for (const auto& r : t.inner) per_record += int(r.boundary_dH.size());

  ordered_json j;
  j["status"] = t.status;
  j["converged"] = t.converged;
  j["outer_iterations"] = t.outer_iterations;
  j["total_inner_iterations"] = t.total_inner_iterations;
  j["inner_iterations_by_record"] = per_record;
  j["outer"] = {{"dH", t.outer_dH},
                {"map_dH", t.outer_map_dH},
                {"rate", rate_or_null(t, LoopLevel::outer)},
                {"increases", t.outer_increases},
                {"normalization_residuals", t.normalization_residuals}};
  j["middle"] = {{"dH", t.middle_dH},
                 {"rate", rate_or_null(t, LoopLevel::middle)},
                 {"not_converged", t.middle_not_converged}};
  j["inner"] = {{"rate", rate_or_null(t, LoopLevel::inner)},
                {"not_converged", t.inner_not_converged},
                {"init", record_json(t.init)},
                {"records", inner}};
  j["min_phi"] = t.min_phi;
  j["min_phihat"] = t.min_phihat;
  j["min_density"] = t.min_density;
  j["endpoint_residual_in"] = sol.endpoint_residual_in;
  j["endpoint_residual_fin"] = sol.endpoint_residual_fin;
  j["cost"] = sol.cost;
  j["warnings"] = t.warnings;
  return j;
}

RunManifest run(const std::string& config_path, const std::string& out_dir,
                const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const RunConfig rc = load_config(config_path);
  const SolverConfig& cfg = rc.solver;

  std::optional<WarmStart> warm;
  if (opts.warm_start) warm = WarmStart{read_pair_csv(*opts.warm_start, cfg.grid(), cfg.time())};

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir);
  const auto out = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  RunManifest man;
  man.config = rc.entries;
  man.version = kArtifactVersion;
  std::vector<std::string> written;

  std::optional<Solution> sol;
  ordered_json trace;
  try {
    sol = solve(cfg, warm);
    man.status = "converged";
    man.exit_code = exit_converged;
  } catch (const NoConvergence& e) {
    sol = e.partial();
    man.status = "no_convergence";
    man.exit_code = exit_no_convergence;
    trace["error"] = {{"type", "NoConvergence"}, {"message", e.what()}};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    man.status = "failed";
    man.exit_code = exit_solver_failure;
    trace["status"] = "failed";
    trace["error"] = {{"type", "SolverError"}, {"message", e.what()}};
  }

  if (sol) {
    const SpatialGrid& g = sol->grid;
    const TimeGrid& tg = sol->time;
    ordered_json body = trace_json(*sol);
    if (trace.contains("error")) body["error"] = trace["error"];
    trace = std::move(body);

    write_path_csv(out("densities.csv"), "p", sol->p, g, tg);
    write_path_csv(out("control.csv"), "u", sol->u, g, tg);
    write_pair_csv(out("pair.csv"), sol->pair, g, tg);
    written.insert(written.end(), {"densities.csv", "control.csv", "pair.csv"});

    if (opts.verify) {
      ordered_json v;
      try {
        const auto prop =
            propagate_density(sol->p_in, sol->u, cfg.effective_potential(), cfg.sigma(), g, tg);
        v["propagation"] = {{"terminal_L1", l1_distance(prop.p.col(tg.steps()), sol->p_fin, g)},
                            {"max_mass_drift", prop.max_mass_drift},
                            {"max_cfl", prop.max_cfl},
                            {"cfl_warnings", prop.cfl_warnings}};
        const auto ens = simulate(sol->u, cfg.effective_potential(), cfg.sigma(), rc.verify_N,
                                  cfg.seed, sol->p_in, g, tg, rc.verify_mode);
        const Field hist = empirical_density(ens, g);
        v["particles"] = {{"N", rc.verify_N},
                          {"seed", cfg.seed},
                          {"interaction", mode_name(ens.pairwise)},
                          {"terminal_L1", l1_distance(hist, sol->p_fin, g)},
                          {"monte_carlo_noise", monte_carlo_noise(sol->p_fin, rc.verify_N, g)},
                          {"warnings", ens.warnings}};
        write_samples(out("samples.csv"), ens);
        write_histogram(out("histogram.csv"), hist, g);
        written.insert(written.end(), {"samples.csv", "histogram.csv"});
      } catch (const IoError&) {
        throw;
      } catch (const Error& e) {
        v["error"] = e.what();
      }
      trace["verification"] = std::move(v);
    }
  }
  write_json(out("trace.json"), trace);
  written.push_back("trace.json");

  for (const auto& name : written)
    man.files.push_back({name, sha256_file(out(name.c_str())), fs::file_size(out(name.c_str()))});
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  ordered_json files = ordered_json::array();
  for (const auto& f : man.files)
    files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  ordered_json m;
  m["version"] = man.version;
  m["status"] = man.status;
  m["exit_code"] = man.exit_code;
  m["config"] = man.config;
  m["files"] = files;
  m["wall_seconds"] = man.wall_seconds;
  write_json(out("manifest.json"), m);
  return man;
}

ClassicReport run_classic(const SolverConfig& cfg) {
  cfg.validate();
  const SpatialGrid g = cfg.grid();
  const TimeGrid tg = cfg.time();
  ClassicReport rep;
  rep.init = classical_sb_init(build_marginals(cfg.marginal_in, g),
                               build_marginals(cfg.marginal_fin, g), cfg.sigma(), g, tg, cfg.tol,
                               cfg.N3);
  rep.u = optimal_control(rep.init.pair, cfg.sigma(), g);
  rep.cost = control_energy(rep.u, rep.init.p, g, tg);
  rep.endpoint_residual_in = l1_distance(rep.init.p.col(0), build_marginals(cfg.marginal_in, g), g);
  rep.endpoint_residual_fin =
      l1_distance(rep.init.p.col(tg.steps()), build_marginals(cfg.marginal_fin, g), g);
  return rep;
}

}  // namespace mfsb
