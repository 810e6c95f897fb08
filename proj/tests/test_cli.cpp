#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mfg/config.hpp"
#include "mfg/error.hpp"
#include "mfg/experiments.hpp"
#include "mfg/io.hpp"

using namespace mfg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mfglab_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int run_tool(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(MFGLAB_BIN) + " " + args + " > /dev/null 2> " + err.string();
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* kSmall = R"(# small quadratic problem
dim = 1
rprime = 2
c_h = 1
alpha = critical
mass = 1.0
domain_l = 8
grid_n = 257
potential.kind = polynomial
potential.b = 2
)";

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(kSmall);
  CHECK(c.problem.dim == 1);
  CHECK(c.problem.alpha_critical);
  CHECK(c.problem.alpha() == 2.0);
  CHECK(c.problem.N == 257);
  CHECK(c.problem.potential.kind == PotentialKind::Polynomial);
  CHECK(c.fractions.size() == 7);

  const RunConfig d = parse_config(
      "dim = 2\nrprime = 3\nc_h = 0.5\nalpha = 1.25\ngrid_n = 33\nsweep.fractions = 0.9, 0.95\ntol.hjb = 1e-9\n");
  CHECK(d.problem.dim == 2);
  CHECK_FALSE(d.problem.alpha_critical);
  CHECK(d.problem.alpha() == 1.25);
  CHECK(d.problem.ham.c_h == 0.5);
  CHECK(d.problem.tol.hjb == 1e-9);
  CHECK(d.fractions == std::vector<double>{0.9, 0.95});

  const RunConfig w = parse_config(
      "potential.kind = multiwell\npotential.wells = -2:1:2; 2:1:4\npotential.d = 0.5\nsweep.multistart = true\n");
  REQUIRE(w.problem.potential.wells.size() == 2);
  CHECK(w.problem.potential.wells[1].q == 4.0);
  CHECK(w.problem.potential.d == 0.5);
  CHECK(w.multistart == true);

  CHECK_THROWS_AS(parse_config("grid_n = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mass = 1.0x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mass = 1\nmass = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("potential.kind = bowl\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("potential.kind = multiwell\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sweep.fractions = 0.95, 0.9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid_n = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("rprime = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/mfglab.cfg"), ConfigError);
}

TEST_CASE("solution container round trip") {
  const fs::path dir = scratch_dir("io");
  ProblemSpec s = parse_config(kSmall).problem;
  const MfgSolution sol = solve_mfg(s, 1.0);
  save_solution(dir / "a.bin", sol);
  const MfgSolution back = load_solution(dir / "a.bin");
  save_solution(dir / "b.bin", back);
  CHECK(slurp(dir / "a.bin") == slurp(dir / "b.bin"));
  CHECK(back.pair.m().values() == sol.pair.m().values());
  CHECK(back.u.u.values() == sol.u.u.values());
  CHECK(back.lambda == sol.lambda);
  CHECK(back.energy == sol.energy);

  CHECK_THROWS_AS(load_solution(dir / "a.bin", make_grid(1, 8, 129)), FormatError);
  const std::string bytes = slurp(dir / "a.bin");
  CHECK_THROWS_AS(deserialize_solution(bytes.substr(0, bytes.size() - 3)), FormatError);
  CHECK_THROWS_AS(deserialize_solution("NOTMAGIC" + bytes.substr(8)), FormatError);
  CHECK_THROWS_AS(deserialize_solution(bytes + "x"), FormatError);
}

TEST_CASE("warm start from a saved solution reproduces the sweep") {
  const fs::path dir = scratch_dir("warm");
  ProblemSpec s = parse_config(kSmall).problem;
  const std::vector<double> masses{1.0, 1.3, 1.6};
  const SweepResult full = continuation_sweep(s, masses);
  REQUIRE(full.entries.size() == 3);
  save_solution(dir / "first.bin", full.entries[0].solution);

  SweepOptions opt;
  opt.init = load_solution(dir / "first.bin", s.grid()).pair;
  const SweepResult rest = continuation_sweep(s, {1.3, 1.6}, opt);
  REQUIRE(rest.entries.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = full.entries[i + 1].report;
    const auto& b = rest.entries[i].report;
    CHECK(std::abs(a.lambda - b.lambda) <= 1e-12 * std::abs(a.lambda));
    CHECK(std::abs(a.epsilon - b.epsilon) <= 1e-12 * a.epsilon);
    CHECK(std::abs(a.energy - b.energy) <= 1e-12 * std::abs(a.energy));
  }
}

TEST_CASE("number formatting and CSV tables") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);

  CsvTable t;
  t.columns = {"a", "b"};
  t.add({1.0, 0.5});
  t.add_cells({"x", "y"});
  CHECK(t.str() == "a,b\n1,0.5\nx,y\n");
  CHECK_THROWS(t.add({1.0}));
}

TEST_CASE("run outputs and manifest") {
  const fs::path dir = scratch_dir("outputs");
  RunConfig cfg = parse_config(kSmall);
  cfg.problem.mass = 1.5;
  const RunOutput out = run_solve(cfg);
  write_outputs(dir, out);
  for (const auto& a : out.files) CHECK(fs::exists(dir / a.name));
  CHECK(fs::exists(dir / "manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const std::string csv = slurp(dir / "solution.csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  std::size_t cols = 1;
  for (char ch : header) cols += ch == ',';
  REQUIRE(manifest["files"].contains("solution.csv"));
  const auto& columns = manifest["files"]["solution.csv"]["columns"];
  CHECK(columns.size() == cols);
  for (const auto& [name, info] : columns.items()) {
    CHECK(info.contains("unit"));
    CHECK(info.contains("meaning"));
  }
  for (auto it = fs::directory_iterator(dir); it != fs::directory_iterator(); ++it)
    CHECK(it->path().extension() != ".tmp");

  // Same config, same bytes.
  const RunOutput again = run_solve(cfg);
  REQUIRE(again.files.size() == out.files.size());
  for (std::size_t i = 0; i < out.files.size(); ++i) CHECK(again.files[i].content == out.files[i].content);
}

TEST_CASE("command-line tool exit codes") {
  const fs::path dir = scratch_dir("tool");
  const fs::path err = dir / "stderr.txt";

  spit(dir / "bad.cfg", "dim = 1\ngrid_n = many\n");
  const fs::path out_bad = dir / "out_bad";
  CHECK(run_tool("solve --config " + (dir / "bad.cfg").string() + " --out " + out_bad.string(), err) == 3);
  CHECK_FALSE(fs::exists(out_bad));
  const auto rec = nlohmann::json::parse(slurp(err));
  CHECK(rec["error"] == "config");
  CHECK(rec["exit_code"] == 3);
  CHECK(rec["subcommand"] == "solve");

  CHECK(run_tool("solve", err) == 3);
  CHECK(run_tool("launch --config x", err) == 3);

  // The oracle is only defined for r' = 2; rejected as a configuration problem.
  spit(dir / "nls.cfg", "rprime = 3\npotential.kind = zero\ngrid_n = 129\n");
  CHECK(run_tool("nls-oracle --config " + (dir / "nls.cfg").string() + " --out " + (dir / "o").string(), err) == 3);
  CHECK(nlohmann::json::parse(slurp(err))["error"] == "config");

  // Solver failure: iteration cap too small.
  spit(dir / "cap.cfg", std::string(kSmall) + "tol.max_iter = 1\n");
  CHECK(run_tool("solve --config " + (dir / "cap.cfg").string() + " --out " + (dir / "c").string(), err) == 2);
  const auto div = nlohmann::json::parse(slurp(err));
  CHECK(div["error"] == "diverged");
  CHECK(div.contains("last_residual"));

  spit(dir / "ok.cfg", kSmall);
  const fs::path out_ok = dir / "out_ok";
  CHECK(run_tool("solve --config " + (dir / "ok.cfg").string() + " --out " + out_ok.string(), err) == 0);
  CHECK(fs::exists(out_ok / "solution.csv"));
  CHECK(fs::exists(out_ok / "manifest.json"));

  const fs::path env_out = dir / "env_out";
  const std::string env = "MFGLAB_OUT_DIR=" + env_out.string() + " ";
  const int st = std::system((env + MFGLAB_BIN + " solve --config " + (dir / "ok.cfg").string() + " > /dev/null").c_str());
  CHECK(WEXITSTATUS(st) == 0);
  CHECK(fs::exists(env_out / "solution.csv"));
}
