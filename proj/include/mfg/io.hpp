#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfg/ground_state.hpp"

namespace mfg {

// Binary container: magic "MFGSOL01", little-endian header and node-ordered float64 payload.
std::string serialize_solution(const MfgSolution& sol);
MfgSolution deserialize_solution(std::string_view bytes);
void save_solution(const std::filesystem::path& path, const MfgSolution& sol);
MfgSolution load_solution(const std::filesystem::path& path);
// Also checks that the stored grid matches `expected`.
MfgSolution load_solution(const std::filesystem::path& path, const Grid& expected);

std::string format_number(double x);  // shortest round-trip representation

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(const std::vector<double>& values);
  void add_cells(std::vector<std::string> cells);
  std::string str() const;
};

// Write to a temporary sibling, then rename over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;
};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series, bool logx = false, bool logy = false);

}  // namespace mfg
