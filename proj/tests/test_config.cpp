#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "mfsb/config.hpp"

using namespace mfsb;

namespace {

const char* kBase = R"(
# two-bump start
domain = -2 2
n_x = 101
n_t = 20
sigma2 = 0.2
theta = 0.7
potential.type = power_repulsive
potential.c = 5
potential.alpha = 0.2
potential.eps = 0.01
marginal_in.weights = 0.5, 0.5
marginal_in.means = 0.5 -0.4
marginal_in.variances = 0.04 0.04
marginal_fin.means = 0.4
marginal_fin.variances = 0.04
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses the flat format") {
  const RunConfig rc = parse_config(std::string(kBase) + "seed = 7\nverify.N = 2000\nverify.mode = binned\n");
  const SolverConfig& c = rc.solver;
  CHECK(c.n_x == 101);
  CHECK(c.n_t == 20);
  CHECK(c.sigma2 == 0.2);
  CHECK(c.theta == 0.7);
  CHECK(c.seed == 7);
  CHECK(c.potential.kind == PotentialKind::power_repulsive);
  CHECK(c.potential.eps == 0.01);
  CHECK(c.marginal_in.means == std::vector<double>{0.5, -0.4});
  CHECK(c.marginal_fin.weights == std::vector<double>{1.0});
  CHECK(rc.verify_N == 2000);
  CHECK(rc.verify_mode == InteractionMode::binned);
  CHECK(rc.entries.at("marginal_in.weights") == "0.5, 0.5");
  CHECK(c.potential_is_prescaled);
}

TEST_CASE("defaults") {
  const RunConfig rc = parse_config(
      "marginal_in.means = 0\nmarginal_in.variances = 0.1\nmarginal_fin.means = 0\n"
      "marginal_fin.variances = 0.1\n");
  CHECK(rc.solver.n_x == 301);
  CHECK(rc.solver.n_t == 100);
  CHECK(rc.solver.tol == 1e-6);
  CHECK(rc.solver.N1 == 200);
  CHECK(rc.solver.N2 == 50);
  CHECK(rc.solver.N3 == 500);
  CHECK(rc.solver.potential.is_zero());
  CHECK(rc.verify_N == 100000);
  CHECK(rc.verify_mode == InteractionMode::automatic);
}

TEST_CASE("errors name the key") {
  const std::string b = kBase;
  CHECK(error_of(b + "theta = 1.5\n").find("theta") != std::string::npos);
  CHECK(error_of(b + "sigma2 = -1\n").find("sigma2") != std::string::npos);
  CHECK(error_of(b + "n_x = 3.5\n").find("n_x") != std::string::npos);
  CHECK(error_of(b + "sigma2 = 0.3\n").find("more than once") != std::string::npos);
  CHECK(error_of(b + "colour = blue\n").find("colour") != std::string::npos);
  CHECK(error_of(b + "potential.a = 1\n").find("potential.a") != std::string::npos);
  CHECK(error_of(b + "tol =\n").find("tol") != std::string::npos);
  CHECK(error_of(b + "just words\n").find("line") != std::string::npos);
  CHECK(error_of(b + "verify.N = 50\n").find("verify.N") != std::string::npos);
  CHECK(error_of(b + "verify.mode = fast\n").find("verify.mode") != std::string::npos);
  CHECK(error_of(b + "domain = 2 -2\n") != "");
  CHECK(error_of(b + "tol = nan\n").find("tol") != std::string::npos);
  std::string bad = b;
  bad.replace(bad.find("0.5, 0.5"), 8, "0.5 0.6");
  CHECK(error_of(bad).find("marginal_in") != std::string::npos);
  bad = b;
  bad.replace(bad.find("power_repulsive"), 15, "cubic");
  CHECK(error_of(bad).find("potential.type") != std::string::npos);
}

TEST_CASE("tabulated files resolve against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "mfsb_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "pin.txt");
    f << "x,density\n-1,0\n0,1\n1,0\n";
    std::ofstream w(dir / "w.txt");
    w << "# r W\n-1 1\n0 0\n1 1\n";
    std::ofstream c(dir / "run.cfg");
    c << "marginal_in.file = pin.txt\nmarginal_fin.means = 0\nmarginal_fin.variances = 0.1\n"
         "potential.type = tabulated\npotential.file = w.txt\n";
  }
  const RunConfig rc = load_config((dir / "run.cfg").string());
  CHECK(rc.solver.marginal_in.kind == MarginalSpec::Kind::tabulated);
  CHECK(rc.solver.marginal_in.table_p.size() == 3);
  CHECK(rc.solver.potential.kind == PotentialKind::tabulated);
  {
    std::ofstream c(dir / "bad.cfg");
    c << "marginal_in.file = pin.txt\nmarginal_in.means = 0\nmarginal_fin.means = 0\n"
         "marginal_fin.variances = 0.1\n";
  }
  CHECK_THROWS_AS(load_config((dir / "bad.cfg").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("constants files") {
  const ConstantsInput both = parse_constants(
      "sigma2 = 0.2\nbeta = 0.01\ngradW_norm = 1\nr = 0.1\na1 = 1\na2 = 1\na3 = 1\nc1 = 0.01\n"
      "c2 = 0.01\nW_norm = 1\nlapW_norm = 1\nm1 = 0.1\nm2 = 0.2\nm3 = 0.15\nm4 = 0.1\n");
  REQUIRE(both.density);
  REQUIRE(both.reaction);
  CHECK(both.density->c2 == 0.01);
  CHECK(both.reaction->m3 == 0.15);
  const ConstantsInput only = parse_constants(
      "sigma2 = 0.2\nbeta = 0.01\ngradW_norm = 1\nm1 = 0.1\nm2 = 0.2\nm3 = 0.15\nm4 = 0.1\n");
  CHECK_FALSE(only.density);
  CHECK(only.reaction);
  CHECK_THROWS_AS(parse_constants("sigma2 = 0.2\nbeta = 0.01\ngradW_norm = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_constants("beta = 0.01\ngradW_norm = 1\nm1 = 0.1\nm2 = 0.2\nm3 = 0.15\nm4 = 0.1\n"),
                  ConfigError);
  // A partial block is not silently dropped.
  CHECK_THROWS_AS(parse_constants("sigma2 = 0.2\nbeta = 0.01\ngradW_norm = 1\nm1 = 0.1\nm2 = 0.2\n"
                                  "m3 = 0.15\nm4 = 0.1\nr = 0.1\n"),
                  ConfigError);
}

}
