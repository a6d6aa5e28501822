#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfsb/metrics.hpp"
#include "mfsb/run.hpp"

using namespace mfsb;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
domain = -2 2
n_x = 81
n_t = 20
sigma2 = 1
potential.type = gaussian_attractive
potential.a = 1
potential.s = 0.3
marginal_in.weights = 0.5 0.5
marginal_in.means = 0.5 -0.4
marginal_in.variances = 0.04 0.04
marginal_fin.means = 0.4
marginal_fin.variances = 0.04
seed = 5
verify.N = 2000
)";

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("mfsb_run_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("run") {

TEST_CASE("end to end with manifest and trace") {
  const fs::path dir = scratch("e2e");
  const fs::path cfg = write_config(dir, kSmall);
  const RunManifest m = run(cfg.string(), (dir / "out").string());
  CHECK(m.status == "converged");
  CHECK(m.exit_code == exit_converged);
  REQUIRE(m.files.size() == 6);
  for (const auto& f : m.files) {
    CHECK(fs::file_size(dir / "out" / f.name) == f.bytes);
    CHECK(sha256_file((dir / "out" / f.name).string()) == f.sha256);
    CHECK(f.sha256.size() == 64);
  }
  const auto man = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(man["version"] == kArtifactVersion);
  CHECK(man["config"]["potential.type"] == "gaussian_attractive");
  const auto tr = nlohmann::json::parse(slurp(dir / "out" / "trace.json"));
  CHECK(tr["converged"] == true);
  int total = 0;
  for (const auto& r : tr["inner"]["records"]) total += r["iterations"].get<int>();
  total += tr["inner"]["init"]["iterations"].get<int>();
  CHECK(total == tr["total_inner_iterations"].get<int>());
  CHECK(tr["verification"]["particles"]["N"] == 2000);
  CHECK(tr["verification"]["propagation"]["max_mass_drift"].get<double>() <= 1e-10);
  fs::remove_all(dir);
}

TEST_CASE("sha256 of a known string") {
  const fs::path dir = scratch("sha");
  std::ofstream(dir / "abc", std::ios::binary) << "abc";
  CHECK(sha256_file((dir / "abc").string()) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(sha256_file((dir / "nope").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("identical inputs give identical bytes") {
  const fs::path dir = scratch("det");
  const fs::path cfg = write_config(dir, kSmall);
  run(cfg.string(), (dir / "a").string());
  run(cfg.string(), (dir / "b").string());
  for (const char* f : {"densities.csv", "control.csv", "pair.csv", "samples.csv",
                        "histogram.csv", "trace.json"})
    CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
  fs::remove_all(dir);
}

TEST_CASE("pair csv round trip and warm start") {
  const fs::path dir = scratch("warm");
  const fs::path cfg = write_config(dir, kSmall);
  run(cfg.string(), (dir / "cold").string(), {false, std::nullopt});
  CHECK_FALSE(fs::exists(dir / "cold" / "samples.csv"));
  const RunConfig rc = load_config(cfg.string());
  const PairPath pair =
      read_pair_csv((dir / "cold" / "pair.csv").string(), rc.solver.grid(), rc.solver.time());
  CHECK(pair.phi.rows() == 81);
  CHECK(pair.phi.cols() == 21);
  CHECK(pair.phi.minCoeff() > 0);
  // %.17g round trips exactly.
  const fs::path again = dir / "again.csv";
  write_pair_csv(again.string(), pair, rc.solver.grid(), rc.solver.time());
  CHECK(slurp(again) == slurp(dir / "cold" / "pair.csv"));

  const RunManifest w =
      run(cfg.string(), (dir / "warm").string(), {false, (dir / "cold" / "pair.csv").string()});
  CHECK(w.status == "converged");
  const auto tr = nlohmann::json::parse(slurp(dir / "warm" / "trace.json"));
  CHECK(tr["outer_iterations"].get<int>() <= 2);

  CHECK_THROWS_AS(read_pair_csv(again.string(), make_grid(-2, 2, 91), rc.solver.time()),
                  ConfigError);
  CHECK_THROWS(read_pair_csv((dir / "missing.csv").string(), rc.solver.grid(), rc.solver.time()));
  fs::remove_all(dir);
}

TEST_CASE("outer non-convergence writes the partial result") {
  const fs::path dir = scratch("nc");
  const fs::path cfg = write_config(dir, std::string(kSmall) + "N1 = 1\n");
  const RunManifest m = run(cfg.string(), (dir / "out").string(), {false, std::nullopt});
  CHECK(m.status == "no_convergence");
  CHECK(m.exit_code == exit_no_convergence);
  CHECK(fs::exists(dir / "out" / "densities.csv"));
  const auto tr = nlohmann::json::parse(slurp(dir / "out" / "trace.json"));
  CHECK(tr["error"]["type"] == "NoConvergence");
  fs::remove_all(dir);
}

TEST_CASE("bad input is raised before anything is written") {
  const fs::path dir = scratch("bad");
  const fs::path cfg = write_config(dir, std::string(kSmall) + "theta = 2\n");
  CHECK_THROWS_AS(run(cfg.string(), (dir / "out").string()), ConfigError);
  CHECK_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}

TEST_CASE("classic report") {
  const RunConfig rc = parse_config(kSmall);
  const ClassicReport r = run_classic(rc.solver);
  CHECK(r.init.record.converged);
  CHECK(r.endpoint_residual_in <= 1e-6);
  CHECK(r.endpoint_residual_fin <= 1e-6);
  CHECK(r.cost > 0);
}

}
