#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

struct Well {
  Point center{0.0, 0.0};
  double a = 1.0;
  double q = 2.0;
};

// Constants of the growth envelope C1(1+|x|^b) <= V <= C2 e^{delta|x|} for |x| >= K.
// moment_b is the moment exponent of the admissible class; recorded only.
struct GrowthParams {
  double c2 = 1e6;
  double delta = 1.0;
  double K = 0.0;  // 0 means L/2
  double b = 1.0;
  double moment_b = 1.0;
};

struct Table {
  int dim = 1;
  std::vector<double> x0, x1;
  std::vector<double> values;  // x0-major
};

enum class PotentialKind { Zero, Polynomial, Multiwell, Tabulated };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Zero;
  double a = 1.0;  // polynomial: a|x|^b
  double b = 2.0;
  std::vector<Well> wells;
  double d = 1.0;                     // multiwell local radius
  std::optional<double> background;   // multiwell quadratic background coefficient
  std::shared_ptr<const Table> table;
  GrowthParams growth;

  static PotentialSpec zero();
  static PotentialSpec polynomial(double b, double a = 1.0);
  static PotentialSpec multiwell(std::vector<Well> wells, double d, std::optional<double> background = {});
  static PotentialSpec tabulated(std::shared_ptr<const Table> table);

  bool is_zero() const;
  double background_coefficient() const;
  void validate() const;
};

double eval_potential(const PotentialSpec& spec, const Point& x);
ScalarField potential_field(const PotentialSpec& spec, const Grid& g);

struct WellEntry {
  Point center{0.0, 0.0};
  double a = 0.0;
  double q = 0.0;
  bool flattest = false;
};

std::vector<WellEntry> well_table(const PotentialSpec& spec);

// Whitespace-separated columns (x V) or (x y V), '#' comments, lexicographic order.
std::shared_ptr<const Table> load_table(const std::string& path, int dim);
std::shared_ptr<const Table> parse_table(const std::string& text, int dim);

struct AssumptionReport {
  double inf_v = 0.0;
  double far_radius = 0.0;
  double lower_c1 = 0.0;
  double upper_c2 = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double sup_nu_ratio = 0.0;
  std::size_t zero_nodes = 0;
  std::size_t zero_clusters = 0;
  bool v1 = false;
  bool v2_lower = false;
  bool v2_upper = false;
  bool v2_ratio = false;
  bool v2_sup = false;
  bool v2 = false;
  bool v3 = false;
};

AssumptionReport check_assumptions(const PotentialSpec& spec, const Grid& g);

}  // namespace mfg
