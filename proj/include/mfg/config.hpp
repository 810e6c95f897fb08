#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfg/problem.hpp"

namespace mfg {

struct RunConfig {
  ProblemSpec problem;
  std::vector<double> fractions{0.90, 0.93, 0.95, 0.97, 0.98, 0.99, 0.995};
  std::vector<double> masses;  // absolute sweep masses; overrides fractions when set
  std::optional<bool> multistart;
  std::optional<std::string> init_path;
  double fit_lo = 0.9;
  double fit_hi = 0.995;
  double seed_mass = 1.0;
  std::optional<double> regprobe_p;
  int regprobe_count = 50;
  int regprobe_n_fine = 0;  // 0 means 2N - 1
  double regprobe_margin = -1.0;
  std::optional<double> regprobe_q;
  bool plots = true;
};

// Flat "key = value" lines; '#' starts a comment. Unknown or repeated keys are errors.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mfg
