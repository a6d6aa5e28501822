#include "mfsb/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace mfsb {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::string s = v;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream ss(s);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& key, const std::string& tok) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(v))
    throw ConfigError(key + ": '" + tok + "' is not a finite number");
  return v;
}

class Entries {
 public:
  Entries(std::map<std::string, std::string> kv, std::string base)
      : kv_(std::move(kv)), base_(std::move(base)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  const std::string& raw(const std::string& key) {
    used_.insert(key);
    return kv_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto toks = split_list(raw(key));
    if (toks.size() != 1) throw ConfigError(key + ": expected a single number");
    return to_double(key, toks[0]);
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const std::string v = trim(raw(key));
    long out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size())
      throw ConfigError(key + ": '" + v + "' is not an integer");
    return out;
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_list(raw(key))) out.push_back(to_double(key, tok));
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = trim(raw(key));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
  }

  std::string path(const std::string& key) {
    std::filesystem::path p(trim(raw(key)));
    if (p.is_relative()) p = std::filesystem::path(base_) / p;
    return p.string();
  }

  void reject_unused() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw ConfigError(k + ": unknown key or not used by this configuration");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::string base_;
  std::set<std::string> used_;
};

MarginalSpec read_marginal(Entries& e, const std::string& name) {
  MarginalSpec m;
  if (e.has(name + ".file")) {
    for (const char* k : {".weights", ".means", ".variances"})
      if (e.has(name + k)) throw ConfigError(name + k + ": cannot be combined with " + name + ".file");
    m.kind = MarginalSpec::Kind::tabulated;
    m.file = e.path(name + ".file");
    try {
      auto [x, p] = read_two_columns(m.file);
      m.table_x = std::move(x);
      m.table_p = std::move(p);
    } catch (const ConfigError& err) {
      throw ConfigError(name + ".file: " + err.what());
    }
    for (Eigen::Index i = 1; i < m.table_x.size(); ++i)
      if (!(m.table_x(i) > m.table_x(i - 1)))
        throw ConfigError(name + ".file: x column must be strictly increasing");
    return m;
  }
  if (!e.has(name + ".means")) throw ConfigError(name + ".means: required (or " + name + ".file)");
  m.means = e.numbers(name + ".means");
  m.weights = e.has(name + ".weights") ? e.numbers(name + ".weights")
                                       : std::vector<double>{1.0};
  m.variances = e.has(name + ".variances") ? e.numbers(name + ".variances")
                                           : std::vector<double>{};
  if (m.variances.empty()) throw ConfigError(name + ".variances: required");
  if (m.weights.size() != m.means.size() || m.variances.size() != m.means.size())
    throw ConfigError(name + ": weights, means and variances must have the same length");
  return m;
}

PotentialSpec read_potential(Entries& e) {
  const std::string type = e.has("potential.type") ? trim(e.raw("potential.type")) : "zero";
  PotentialKind kind;
  try {
    kind = potential_kind_from_string(type);
  } catch (const ConfigError&) {
    throw ConfigError("potential.type: unknown potential '" + type + "'");
  }
  PotentialSpec base;
  const double beta = e.number("potential.beta", 1.0);
  switch (kind) {
    case PotentialKind::zero:
      return PotentialSpec::none();
    case PotentialKind::power_repulsive:
      return PotentialSpec::power_repulsive(e.number("potential.c", base.c),
                                            e.number("potential.alpha", base.alpha),
                                            e.number("potential.eps", base.eps), beta);
    case PotentialKind::gaussian_attractive:
      return PotentialSpec::gaussian_attractive(e.number("potential.a", base.a),
                                                e.number("potential.s", base.s), beta);
    case PotentialKind::tabulated: {
      if (!e.has("potential.file")) throw ConfigError("potential.file: required for tabulated");
      const std::string file = e.path("potential.file");
      try {
        return load_tabulated_potential(file, beta);
      } catch (const ConfigError& err) {
        throw ConfigError(std::string("potential.file: ") + err.what());
      }
    }
  }
  return base;
}

}  // namespace

namespace {

std::map<std::string, std::string> parse_pairs(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (value.empty()) throw ConfigError(key + ": empty value");
    if (!kv.emplace(key, value).second) throw ConfigError(key + ": given more than once");
  }
  return kv;
}

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot read ") + what + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  std::map<std::string, std::string> kv = parse_pairs(text);

  RunConfig rc;
  rc.entries = kv;
  Entries e(std::move(kv), base_dir);
  SolverConfig& c = rc.solver;
  if (e.has("domain")) {
    const auto d = e.numbers("domain");
    if (d.size() != 2) throw ConfigError("domain: expected two numbers x_min x_max");
    c.x_min = d[0];
    c.x_max = d[1];
  }
  c.n_x = e.integer("n_x", c.n_x);
  c.n_t = e.integer("n_t", c.n_t);
  c.sigma2 = e.number("sigma2", c.sigma2);
  c.theta = e.number("theta", c.theta);
  c.tol = e.number("tol", c.tol);
  c.N1 = int(e.integer("N1", c.N1));
  c.N2 = int(e.integer("N2", c.N2));
  c.N3 = int(e.integer("N3", c.N3));
  const long seed = e.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed: must be nonnegative");
  c.seed = std::uint64_t(seed);
  c.potential = read_potential(e);
  c.potential_is_prescaled = e.boolean("potential_is_prescaled", true);
  c.marginal_in = read_marginal(e, "marginal_in");
  c.marginal_fin = read_marginal(e, "marginal_fin");

  const long n = e.integer("verify.N", rc.verify_N);
  if (n < 100 || n > 100000000) throw ConfigError("verify.N: must lie in [100, 1e8]");
  rc.verify_N = int(n);
  if (e.has("verify.mode")) {
    const std::string m = trim(e.raw("verify.mode"));
    if (m == "auto") rc.verify_mode = InteractionMode::automatic;
    else if (m == "pairwise") rc.verify_mode = InteractionMode::pairwise;
    else if (m == "binned") rc.verify_mode = InteractionMode::binned;
    else throw ConfigError("verify.mode: expected auto, pairwise or binned");
  }
  e.reject_unused();
  c.validate();
  return rc;
}

RunConfig load_config(const std::string& path) {
  return parse_config(slurp(path, "config"), std::filesystem::path(path).parent_path().string());
}

ConstantsInput parse_constants(const std::string& text) {
  Entries e(parse_pairs(text), ".");
  const auto need = [&](const char* key) {
    if (!e.has(key)) throw ConfigError(std::string(key) + ": required");
    return e.number(key, 0.0);
  };
  const auto all = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (!e.has(k)) return false;
    return true;
  };
  ConstantsInput out;
  out.sigma2 = need("sigma2");
  const double beta = need("beta");
  const double grad = need("gradW_norm");
  if (all({"r", "a1", "a2", "a3", "c1", "c2", "W_norm", "lapW_norm"})) {
    DensityMapConstants d;
    d.beta = beta;
    d.gradW_norm = grad;
    d.r = e.number("r", 0);
    d.a1 = e.number("a1", 0);
    d.a2 = e.number("a2", 0);
    d.a3 = e.number("a3", 0);
    d.c1 = e.number("c1", 0);
    d.c2 = e.number("c2", 0);
    d.W_norm = e.number("W_norm", 0);
    d.lapW_norm = e.number("lapW_norm", 0);
    out.density = d;
  }
  if (all({"m1", "m2", "m3", "m4"})) {
    ReactionMapConstants r;
    r.beta = beta;
    r.gradW_norm = grad;
    r.m1 = e.number("m1", 0);
    r.m2 = e.number("m2", 0);
    r.m3 = e.number("m3", 0);
    r.m4 = e.number("m4", 0);
    out.reaction = r;
  }
  if (!out.density && !out.reaction)
    throw ConfigError("constants: give every density-map key (r, a1, a2, a3, c1, c2, W_norm, "
                      "lapW_norm) or every reaction-map key (m1 .. m4)");
  e.reject_unused();
  return out;
}

ConstantsInput load_constants(const std::string& path) {
  return parse_constants(slurp(path, "constants file"));
}

}  // namespace mfsb
