#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfg/config.hpp"
#include "mfg/error.hpp"
#include "mfg/experiments.hpp"

namespace {

constexpr int kSolverError = 2;
constexpr int kConfigError = 3;

int report_error(const std::string& sub, const std::string& kind, const std::string& message, int code,
                 const mfg::Error* err = nullptr) {
  nlohmann::ordered_json rec{{"error", kind}, {"message", message}, {"subcommand", sub}, {"exit_code", code}};
  if (auto* d = dynamic_cast<const mfg::DivergedError*>(err)) {
    rec["last_residual"] = d->last_residual();
    rec["iterations"] = d->history().size();
  }
  if (auto* s = dynamic_cast<const mfg::SweepError*>(err)) {
    rec["mass_index"] = s->index();
  }
  std::cerr << rec.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary mean-field game solver and critical-mass diagnostics"};
  app.require_subcommand(1);
  std::string config, out;
  int threads = 1;
  for (const auto& name : mfg::subcommands()) {
    auto* sc = app.add_subcommand(name, "run the " + name + " pipeline");
    sc->add_option("--config", config, "key = value configuration file")->required();
    sc->add_option("--out", out, "output directory (default: out_dir key, then $MFGLAB_OUT_DIR, then ./out)");
    sc->add_option("--threads", threads, "worker threads for independent solves")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kConfigError;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  mfg::RunConfig cfg;
  try {
    cfg = mfg::load_config(config);
  } catch (const mfg::Error& e) {
    return report_error(sub, e.kind(), e.what(), kConfigError, &e);
  }
  if (out.empty()) out = cfg.problem.out_dir;
  if (out.empty()) {
    const char* env = std::getenv("MFGLAB_OUT_DIR");
    out = env && *env ? env : "out";
  }

  try {
    const mfg::RunOutput res = mfg::run_subcommand(sub, cfg, threads);
    mfg::write_outputs(out, res);
    std::cout << res.summary;
    std::cout << "outputs written to " << out << '\n';
    return 0;
  } catch (const mfg::ConfigError& e) {
    return report_error(sub, e.kind(), e.what(), kConfigError, &e);
  } catch (const mfg::FormatError& e) {
    return report_error(sub, e.kind(), e.what(), kConfigError, &e);
  } catch (const mfg::Error& e) {
    return report_error(sub, e.kind(), e.what(), kSolverError, &e);
  } catch (const std::exception& e) {
    return report_error(sub, "io", e.what(), kSolverError);
  }
}
