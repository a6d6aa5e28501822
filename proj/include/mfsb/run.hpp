#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfsb/config.hpp"
#include "mfsb/solver.hpp"

namespace mfsb {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  exit_converged = 0,
  exit_input_error = 1,
  exit_no_convergence = 2,
  exit_solver_failure = 3,
};

struct RunOptions {
  bool verify = true;
  std::optional<std::string> warm_start;  // pair.csv from an earlier run
};

struct FileDigest {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::map<std::string, std::string> config;
  std::string version;
  std::string status;  // converged, no_convergence, failed
  int exit_code = exit_converged;
  double wall_seconds = 0.0;
  std::vector<FileDigest> files;
};

/// Rows (t, x, value) for every slice and node.
void write_path_csv(const std::string& path, const char* column, const FieldPath& f,
                    const SpatialGrid& g, const TimeGrid& tg);
/// Rows (t, x, phi, phihat).
void write_pair_csv(const std::string& path, const PairPath& pair, const SpatialGrid& g,
                    const TimeGrid& tg);
/// Reads a pair.csv back; its grid must match g and tg exactly.
PairPath read_pair_csv(const std::string& path, const SpatialGrid& g, const TimeGrid& tg);

std::string sha256_file(const std::string& path);

/// Convergence histories, rates and residuals of a solve.
nlohmann::ordered_json trace_json(const Solution& sol);

/// Solve, verify, write every output into out_dir. Input problems throw ConfigError or
/// IoError; solver outcomes are reported through the manifest status and exit code.
RunManifest run(const std::string& config_path, const std::string& out_dir,
                const RunOptions& opts = {});

/// The interaction-free reference solve for the marginals of a config.
struct ClassicReport {
  ClassicalInit init;
  FieldPath u;
  double cost = 0.0;
  double endpoint_residual_in = 0.0;
  double endpoint_residual_fin = 0.0;
};
ClassicReport run_classic(const SolverConfig& cfg);

}  // namespace mfsb
