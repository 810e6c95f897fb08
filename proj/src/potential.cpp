#include "mfg/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfg/error.hpp"

namespace mfg {

namespace {

double dist(const Point& x, const Point& y) { return std::hypot(x[0] - y[0], x[1] - y[1]); }

// 1 on [0,1/2], C1 smoothstep down to 0 at 1.
double bump(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = 2.0 * s - 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

double table_axis(const std::vector<double>& ax, double x, std::size_t& i) {
  if (ax.size() == 1) {
    i = 0;
    return 0.0;
  }
  x = std::clamp(x, ax.front(), ax.back());
  auto it = std::upper_bound(ax.begin(), ax.end(), x);
  i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - ax.begin() - 1));
  i = std::min(i, ax.size() - 2);
  return (x - ax[i]) / (ax[i + 1] - ax[i]);
}

double eval_table(const Table& t, const Point& x) {
  std::size_t i, j = 0;
  const double s = table_axis(t.x0, x[0], i);
  if (t.dim == 1) return (1 - s) * t.values[i] + s * t.values[i + 1];
  const double u = table_axis(t.x1, x[1], j);
  const std::size_t n1 = t.x1.size();
  return (1 - s) * (1 - u) * t.values[i * n1 + j] + s * (1 - u) * t.values[(i + 1) * n1 + j] +
         (1 - s) * u * t.values[i * n1 + j + 1] + s * u * t.values[(i + 1) * n1 + j + 1];
}

}  // namespace

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::polynomial(double b, double a) {
  PotentialSpec s;
  s.kind = PotentialKind::Polynomial;
  s.a = a;
  s.b = b;
  s.validate();
  return s;
}

PotentialSpec PotentialSpec::multiwell(std::vector<Well> wells, double d, std::optional<double> background) {
  PotentialSpec s;
  s.kind = PotentialKind::Multiwell;
  s.wells = std::move(wells);
  s.d = d;
  s.background = background;
  s.validate();
  return s;
}

PotentialSpec PotentialSpec::tabulated(std::shared_ptr<const Table> table) {
  PotentialSpec s;
  s.kind = PotentialKind::Tabulated;
  s.table = std::move(table);
  s.validate();
  return s;
}

bool PotentialSpec::is_zero() const {
  return kind == PotentialKind::Zero || (kind == PotentialKind::Polynomial && a == 0.0);
}

double PotentialSpec::background_coefficient() const {
  if (background) return *background;
  double c = 0.0;
  for (const auto& w : wells) c = std::max(c, w.a * std::pow(d, w.q));
  return c;
}

void PotentialSpec::validate() const {
  switch (kind) {
    case PotentialKind::Zero:
      break;
    case PotentialKind::Polynomial:
      if (!(b > 0.0) || !(a >= 0.0)) throw ConfigError("polynomial potential needs b > 0 and a >= 0");
      break;
    case PotentialKind::Multiwell:
      if (wells.empty()) throw ConfigError("multiwell potential needs at least one well");
      if (!(d > 0.0)) throw ConfigError("multiwell radius d must be positive");
      for (const auto& w : wells)
        if (!(w.a > 0.0) || !(w.q > 0.0)) throw ConfigError("well coefficients a, q must be positive");
      for (std::size_t i = 0; i < wells.size(); ++i)
        for (std::size_t j = i + 1; j < wells.size(); ++j)
          if (!(dist(wells[i].center, wells[j].center) > 2.0 * d))
            throw ConfigError("wells must be separated by more than 2d");
      if (background && !(*background > 0.0)) throw ConfigError("background coefficient must be positive");
      break;
    case PotentialKind::Tabulated:
      if (!table || table->values.empty()) throw ConfigError("tabulated potential has no table");
      for (double v : table->values)
        if (v < 0.0) throw ConfigError("tabulated potential must be nonnegative");
      break;
  }
}

double eval_potential(const PotentialSpec& spec, const Point& x) {
  switch (spec.kind) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Polynomial:
      return spec.a == 0.0 ? 0.0 : spec.a * std::pow(std::hypot(x[0], x[1]), spec.b);
    case PotentialKind::Multiwell: {
      double local = 0.0, weight = 0.0;
      for (const auto& w : spec.wells) {
        const double r = dist(x, w.center);
        const double chi = bump(r / spec.d);
        if (chi > 0.0) {
          local += chi * w.a * std::pow(r, w.q);
          weight += chi;
        }
      }
      const double r2 = x[0] * x[0] + x[1] * x[1];
      return local + (1.0 - weight) * spec.background_coefficient() * (1.0 + r2);
    }
    case PotentialKind::Tabulated:
      return eval_table(*spec.table, x);
  }
  return 0.0;
}

ScalarField potential_field(const PotentialSpec& spec, const Grid& g) {
  return ScalarField::from_function(g, [&](const Point& x) { return eval_potential(spec, x); });
}

std::vector<WellEntry> well_table(const PotentialSpec& spec) {
  std::vector<WellEntry> out;
  if (spec.kind == PotentialKind::Polynomial && spec.a > 0.0)
    out.push_back({{0.0, 0.0}, spec.a, spec.b, true});
  if (spec.kind == PotentialKind::Multiwell) {
    double qmax = 0.0;
    for (const auto& w : spec.wells) qmax = std::max(qmax, w.q);
    for (const auto& w : spec.wells) out.push_back({w.center, w.a, w.q, w.q == qmax});
  }
  return out;
}

std::shared_ptr<const Table> parse_table(const std::string& text, int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("table dimension must be 1 or 2");
  std::vector<std::array<double, 3>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<double> cols;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t pos = 0;
        cols.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError("table line " + std::to_string(lineno) + ": not a number: " + tok);
      }
    }
    if (cols.empty()) continue;
    if (static_cast<int>(cols.size()) != dim + 1)
      throw FormatError("table line " + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) +
                        " columns");
    rows.push_back({cols[0], dim == 2 ? cols[1] : 0.0, cols[dim]});
  }
  if (rows.size() < 2) throw FormatError("table needs at least two nodes");
  auto t = std::make_shared<Table>();
  t->dim = dim;
  if (dim == 1) {
    for (const auto& r : rows) {
      if (!t->x0.empty() && !(r[0] > t->x0.back())) throw FormatError("table abscissae must increase");
      t->x0.push_back(r[0]);
      t->values.push_back(r[2]);
    }
    return t;
  }
  for (const auto& r : rows) {
    if (r[0] != rows[0][0]) break;
    t->x1.push_back(r[1]);
  }
  const std::size_t n1 = t->x1.size();
  if (n1 < 2 || rows.size() % n1 != 0) throw FormatError("2D table is not a tensor grid");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i % n1 == 0) {
      if (!t->x0.empty() && !(r[0] > t->x0.back())) throw FormatError("table x must increase");
      t->x0.push_back(r[0]);
    }
    if (r[0] != t->x0.back() || r[1] != t->x1[i % n1]) throw FormatError("2D table is not lexicographic");
    t->values.push_back(r[2]);
  }
  for (std::size_t j = 1; j < n1; ++j)
    if (!(t->x1[j] > t->x1[j - 1])) throw FormatError("table y must increase");
  return t;
}

std::shared_ptr<const Table> load_table(const std::string& path, int dim) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open potential table: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_table(ss.str(), dim);
}

AssumptionReport check_assumptions(const PotentialSpec& spec, const Grid& g) {
  AssumptionReport rep;
  const auto V = potential_field(spec, g).values();
  const double vmax = *std::max_element(V.begin(), V.end());
  const double vmin = *std::min_element(V.begin(), V.end());
  const double ztol = 1e-12 * std::max(1.0, vmax);
  rep.inf_v = vmin;
  rep.v1 = vmin >= 0.0 && vmin <= ztol;

  const auto& gp = spec.growth;
  const double K = gp.K > 0.0 ? gp.K : 0.5 * g.L;
  rep.far_radius = K;
  std::vector<std::size_t> far;
  for (std::size_t i = 0; i < V.size(); ++i) {
    const Point x = g.point(i);
    if (std::hypot(x[0], x[1]) >= K) far.push_back(i);
  }
  // Subsample the far field to bound the cost of the offset scan.
  const std::size_t step = std::max<std::size_t>(1, far.size() / 400);
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, nu_max = 0.0;
  std::vector<Point> offsets;
  const int reach = static_cast<int>(std::ceil(2.0 / g.h));
  const int ostep = std::max(1, reach / 8);
  for (int a = -reach; a <= reach; a += ostep)
    for (int b = (g.dim == 2 ? -reach : 0); b <= (g.dim == 2 ? reach : 0); b += ostep) {
      const Point y{a * g.h, b * g.h};
      if (std::hypot(y[0], y[1]) < 2.0) offsets.push_back(y);
    }
  for (std::size_t s = 0; s < far.size(); s += step) {
    const std::size_t i = far[s];
    const Point x = g.point(i);
    const double r = std::hypot(x[0], x[1]);
    c1 = std::min(c1, V[i] / (1.0 + std::pow(r, gp.b)));
    c2 = std::max(c2, V[i] * std::exp(-gp.delta * r));
    if (V[i] <= 0.0) {
      rmin = 0.0;
      continue;
    }
    for (const auto& y : offsets) {
      const Point z{x[0] + y[0], x[1] + y[1]};
      if (std::abs(z[0]) > g.L || std::abs(z[1]) > g.L) continue;
      const double q = eval_potential(spec, z) / V[i];
      rmin = std::min(rmin, q);
      rmax = std::max(rmax, q);
    }
    for (int k = 0; k <= 20; ++k) {
      const double nu = k / 20.0;
      nu_max = std::max(nu_max, eval_potential(spec, {nu * x[0], nu * x[1]}) / V[i]);
    }
  }
  if (far.empty()) c1 = rmin = 1.0;
  rep.lower_c1 = c1;
  rep.upper_c2 = c2;
  rep.ratio_min = rmin;
  rep.ratio_max = rmax;
  rep.sup_nu_ratio = nu_max;
  rep.v2_lower = c1 > 0.0;
  rep.v2_upper = c2 <= gp.c2;
  rep.v2_ratio = rmin > 0.0 && rmax <= gp.c2;
  rep.v2_sup = nu_max <= gp.c2;
  rep.v2 = rep.v2_lower && rep.v2_upper && rep.v2_ratio && rep.v2_sup;

  // Zero set: connected clusters of near-zero nodes, each a few nodes wide.
  std::vector<int> label(V.size(), -1);
  std::size_t biggest = 0;
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (V[i] > ztol || label[i] >= 0) continue;
    ++rep.zero_nodes;
    std::vector<std::size_t> stack{i};
    label[i] = static_cast<int>(rep.zero_clusters);
    std::size_t count = 0;
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      ++count;
      const auto mi = g.multi(j);
      for (int k = 0; k < g.dim; ++k)
        for (int sgn : {-1, 1}) {
          const int c = mi[k] + sgn;
          if (c < 0 || c >= g.N) continue;
          auto mj = mi;
          mj[k] = c;
          const std::size_t n = g.index(mj[0], mj[1]);
          if (V[n] <= ztol && label[n] < 0) {
            label[n] = label[i];
            stack.push_back(n);
            ++rep.zero_nodes;
          }
        }
    }
    biggest = std::max(biggest, count);
    ++rep.zero_clusters;
  }
  const std::size_t cap = g.dim == 1 ? 3 : 9;
  rep.v3 = rep.zero_clusters > 0 && biggest <= cap;
  return rep;
}

}  // namespace mfg
