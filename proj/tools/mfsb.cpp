// Command-line front end: run, constants, classic.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "mfsb/config.hpp"
#include "mfsb/run.hpp"
#include "mfsb/theorem_constants.hpp"

namespace {

using namespace mfsb;

int do_run(const std::string& config, const std::string& out, bool no_verify,
           const std::string& warm) {
  RunOptions opts;
  opts.verify = !no_verify;
  if (!warm.empty()) opts.warm_start = warm;
  const RunManifest m = run(config, out, opts);
  std::printf("status %s  wall %.1f s  outputs in %s\n", m.status.c_str(), m.wall_seconds,
              out.c_str());
  return m.exit_code;
}

int do_constants(const std::string& path) {
  const ConstantsInput in = load_constants(path);
  nlohmann::ordered_json j;
  if (in.density) {
    const auto r = density_map_constant(*in.density, in.sigma2);
    j["lambda"] = {{"value", r.value}, {"contractive", r.contractive}};
  }
  if (in.reaction) {
    const auto r = reaction_map_constant(*in.reaction, in.sigma2);
    j["Lambda_p"] = {{"value", r.value}, {"contractive", r.contractive}};
  }
  std::cout << j.dump(2) << '\n';
  return exit_converged;
}

int do_classic(const std::string& config, const std::string& out) {
  const RunConfig rc = load_config(config);
  const ClassicReport rep = run_classic(rc.solver);
  const SpatialGrid g = rc.solver.grid();
  const TimeGrid tg = rc.solver.time();
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    namespace fs = std::filesystem;
    write_path_csv((fs::path(out) / "densities.csv").string(), "p", rep.init.p, g, tg);
    write_path_csv((fs::path(out) / "control.csv").string(), "u", rep.u, g, tg);
    write_pair_csv((fs::path(out) / "pair.csv").string(), rep.init.pair, g, tg);
  }
  nlohmann::ordered_json j;
  j["converged"] = rep.init.record.converged;
  j["iterations"] = rep.init.record.boundary_dH.size();
  j["boundary_dH"] = rep.init.record.boundary_dH;
  j["endpoint_residual_in"] = rep.endpoint_residual_in;
  j["endpoint_residual_fin"] = rep.endpoint_residual_fin;
  j["cost"] = rep.cost;
  std::cout << j.dump(2) << '\n';
  return rep.init.record.converged ? exit_converged : exit_no_convergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field Schrodinger bridge solver"};
  app.require_subcommand(1);

  std::string config, out, warm, constants_file, classic_out;
  bool no_verify = false;

  auto* run_cmd = app.add_subcommand("run", "solve, verify and write results");
  run_cmd->add_option("config", config, "config file")->required();
  run_cmd->add_option("--out", out, "output directory")->required();
  run_cmd->add_flag("--no-verify", no_verify, "skip the propagation and particle checks");
  run_cmd->add_option("--warm-start", warm, "pair.csv from an earlier run");

  auto* const_cmd = app.add_subcommand("constants", "evaluate the contraction bounds");
  const_cmd->add_option("file", constants_file, "constants file")->required();

  auto* classic_cmd = app.add_subcommand("classic", "interaction-free reference solve");
  classic_cmd->add_option("config", config, "config file")->required();
  classic_cmd->add_option("--out", classic_out, "optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_input_error;
  }

  try {
    if (*run_cmd) return do_run(config, out, no_verify, warm);
    if (*const_cmd) return do_constants(constants_file);
    if (*classic_cmd) return do_classic(config, classic_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_solver_failure;
  }
  return exit_input_error;
}
