#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mfg/config.hpp"

namespace mfg {

struct Artifact {
  std::string name;
  std::string content;
};

// Everything a subcommand produces; nothing touches the disk until write_outputs.
struct RunOutput {
  std::string subcommand;
  std::vector<Artifact> files;
  std::string summary;
  std::map<std::string, double> metrics;
};

RunOutput run_solve(const RunConfig& cfg);
RunOutput run_sweep(const RunConfig& cfg);
RunOutput run_gamma(const RunConfig& cfg);
RunOutput run_blowup(const RunConfig& cfg);
RunOutput run_regprobe(const RunConfig& cfg, int threads = 1);
RunOutput run_nls(const RunConfig& cfg);

const std::vector<std::string>& subcommands();
RunOutput run_subcommand(const std::string& name, const RunConfig& cfg, int threads = 1);

// Atomic per artifact, plus manifest.json describing units of every CSV column.
void write_outputs(const std::filesystem::path& dir, const RunOutput& out);

}  // namespace mfg
