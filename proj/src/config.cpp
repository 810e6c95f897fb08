#include "mfg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mfg/error.hpp"

namespace mfg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

// "x:a:q; x:a:q" in 1D, "x,y:a:q; ..." in 2D.
std::vector<Well> to_wells(const std::string& key, const std::string& v, int dim) {
  std::vector<Well> wells;
  for (const auto& item : split(v, ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError("key '" + key + "': well '" + item + "' is not center:a:q");
    const auto c = to_list(key, parts[0]);
    if (static_cast<int>(c.size()) != dim) throw ConfigError("key '" + key + "': well center has wrong dimension");
    Well w;
    w.center = {c[0], dim == 2 ? c[1] : 0.0};
    w.a = to_double(key, parts[1]);
    w.q = to_double(key, parts[2]);
    wells.push_back(w);
  }
  return wells;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError("key '" + key + "' given twice");
  }

  RunConfig cfg;
  ProblemSpec& p = cfg.problem;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = to_double(k, *v);
  };

  if (auto v = get("dim")) p.dim = static_cast<int>(to_int("dim", *v));
  double rprime = 2.0, c_h = 1.0;
  num("rprime", rprime);
  num("c_h", c_h);
  p.ham = HamiltonianSpec::make(rprime, c_h);
  if (auto v = get("alpha")) {
    if (*v == "critical") {
      p.alpha_critical = true;
    } else {
      p.alpha_critical = false;
      p.alpha_value = to_double("alpha", *v);
    }
  }
  num("mass", p.mass);
  num("domain_l", p.L);
  if (auto v = get("grid_n")) p.N = static_cast<int>(to_int("grid_n", *v));
  num("tol.hjb", p.tol.hjb);
  num("tol.fp", p.tol.fp);
  num("tol.fixpoint", p.tol.fixpoint);
  if (auto v = get("tol.max_iter")) p.tol.max_iter = static_cast<int>(to_int("tol.max_iter", *v));
  if (auto v = get("tol.hjb_max_iter")) p.tol.hjb_max_iter = static_cast<int>(to_int("tol.hjb_max_iter", *v));
  num("damping", p.damping);
  if (auto v = get("moll_radius")) p.moll_radius = to_double("moll_radius", *v);
  if (auto v = get("seed")) {
    const long long s = to_int("seed", *v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    p.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("out_dir")) p.out_dir = *v;
  if (auto v = get("ground.lambda")) p.lambda_gauge = to_double("ground.lambda", *v);
  num("ground.seed_mass", cfg.seed_mass);
  num("density_cap", p.density_cap);

  const std::string kind = get("potential.kind").value_or("zero");
  GrowthParams growth;
  num("potential.growth.c2", growth.c2);
  num("potential.growth.delta", growth.delta);
  num("potential.growth.k", growth.K);
  num("potential.growth.b", growth.b);
  num("potential.growth.moment_b", growth.moment_b);
  if (kind == "zero") {
    p.potential = PotentialSpec::zero();
  } else if (kind == "polynomial") {
    double a = 1.0, b = 2.0;
    num("potential.a", a);
    num("potential.b", b);
    p.potential = PotentialSpec::polynomial(b, a);
  } else if (kind == "multiwell") {
    const auto w = get("potential.wells");
    if (!w) throw ConfigError("multiwell potential needs potential.wells");
    double d = 1.0;
    num("potential.d", d);
    std::optional<double> bg;
    if (auto v = get("potential.background")) bg = to_double("potential.background", *v);
    p.potential = PotentialSpec::multiwell(to_wells("potential.wells", *w, p.dim), d, bg);
  } else if (kind == "table") {
    const auto f = get("potential.table");
    if (!f) throw ConfigError("tabulated potential needs potential.table");
    std::filesystem::path path(*f);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    p.potential = PotentialSpec::tabulated(load_table(path.string(), p.dim));
  } else {
    throw ConfigError("unknown potential.kind '" + kind + "'");
  }
  p.potential.growth = growth;

  if (auto v = get("sweep.fractions")) cfg.fractions = to_list("sweep.fractions", *v);
  if (auto v = get("sweep.masses")) cfg.masses = to_list("sweep.masses", *v);
  if (auto v = get("sweep.multistart")) cfg.multistart = to_bool("sweep.multistart", *v);
  if (auto v = get("sweep.init")) {
    std::filesystem::path path(*v);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    cfg.init_path = path.string();
  }
  num("fit.lo", cfg.fit_lo);
  num("fit.hi", cfg.fit_hi);
  if (auto v = get("regprobe.p")) cfg.regprobe_p = to_double("regprobe.p", *v);
  if (auto v = get("regprobe.count")) cfg.regprobe_count = static_cast<int>(to_int("regprobe.count", *v));
  if (auto v = get("regprobe.n_fine")) cfg.regprobe_n_fine = static_cast<int>(to_int("regprobe.n_fine", *v));
  num("regprobe.margin", cfg.regprobe_margin);
  if (auto v = get("regprobe.q")) cfg.regprobe_q = to_double("regprobe.q", *v);
  if (auto v = get("plots")) cfg.plots = to_bool("plots", *v);

  static const std::set<std::string> known{
      "dim", "rprime", "c_h", "alpha", "mass", "domain_l", "grid_n", "tol.hjb", "tol.fp", "tol.fixpoint",
      "tol.max_iter", "tol.hjb_max_iter", "damping", "moll_radius", "seed", "out_dir", "ground.lambda",
      "ground.seed_mass", "density_cap", "potential.kind", "potential.a", "potential.b", "potential.wells",
      "potential.d", "potential.background", "potential.table", "potential.growth.c2", "potential.growth.delta",
      "potential.growth.k", "potential.growth.b", "potential.growth.moment_b", "sweep.fractions", "sweep.masses",
      "sweep.multistart", "sweep.init", "fit.lo", "fit.hi", "regprobe.p", "regprobe.count", "regprobe.n_fine",
      "regprobe.margin", "regprobe.q", "plots"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "'");

  p.validate();
  for (std::size_t i = 0; i < cfg.fractions.size(); ++i) {
    if (!(cfg.fractions[i] > 0.0)) throw ConfigError("sweep fractions must be positive");
    if (i > 0 && !(cfg.fractions[i] > cfg.fractions[i - 1])) throw ConfigError("sweep fractions must increase");
  }
  for (std::size_t i = 0; i < cfg.masses.size(); ++i) {
    if (!(cfg.masses[i] > 0.0)) throw ConfigError("sweep masses must be positive");
    if (i > 0 && !(cfg.masses[i] > cfg.masses[i - 1])) throw ConfigError("sweep masses must increase");
  }
  if (!(cfg.fit_lo < cfg.fit_hi)) throw ConfigError("fit.lo must be below fit.hi");
  if (!(cfg.seed_mass > 0.0)) throw ConfigError("ground.seed_mass must be positive");
  if (cfg.regprobe_count < 0) throw ConfigError("regprobe.count must be non-negative");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace mfg
