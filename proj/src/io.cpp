#include "mfg/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mfg/error.hpp"

namespace mfg {

static_assert(std::endian::native == std::endian::little, "binary container assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'F', 'G', 'S', 'O', 'L', '0', '1'};

class Writer {
 public:
  template <class T>
  void put(T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out_.append(b, sizeof(T));
  }
  void put_vec(const std::vector<double>& v) {
    put<std::uint64_t>(v.size());
    for (double x : v) put(x);
  }
  void put_bytes(const std::vector<std::uint8_t>& v) {
    put<std::uint64_t>(v.size());
    out_.append(reinterpret_cast<const char*>(v.data()), v.size());
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::vector<double> get_vec(std::size_t expected) {
    const auto n = get<std::uint64_t>();
    if (n != expected) throw FormatError("payload length does not match the header grid");
    std::vector<double> v(n);
    for (auto& x : v) x = get<double>();
    return v;
  }
  std::vector<std::uint8_t> get_bytes(std::size_t expected) {
    const auto n = get<std::uint64_t>();
    if (n != 0 && n != expected) throw FormatError("mask length does not match the header grid");
    need(n);
    std::vector<std::uint8_t> v(s_.begin() + pos_, s_.begin() + pos_ + n);
    pos_ += n;
    return v;
  }
  void need(std::size_t n) const {
    if (pos_ + n > s_.size()) throw FormatError("truncated solution file");
  }
  bool done() const { return pos_ == s_.size(); }
  std::string_view take(std::size_t n) {
    need(n);
    auto v = s_.substr(pos_, n);
    pos_ += n;
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_solution(const MfgSolution& sol) {
  const Grid& g = sol.grid();
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.put<std::int32_t>(g.dim);
  w.put<std::int32_t>(g.N);
  w.put(g.L);
  w.put(sol.ham.rprime);
  w.put(sol.ham.c_h);
  w.put(sol.alpha);
  w.put(sol.mass());
  w.put(sol.lambda);
  w.put(sol.energy);
  w.put(sol.residual);
  w.put(sol.coupling);
  w.put<std::int32_t>(sol.iterations);
  w.put<std::uint8_t>(sol.converged);
  w.put<std::uint8_t>(sol.potential_free);
  w.put(sol.u.lambda);
  w.put(sol.u.residual_norm);
  w.put<std::int32_t>(sol.u.iterations);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(sol.u.mask.closure));
  w.put<std::uint8_t>(sol.u.normalization == "min-zero" ? 0 : 1);
  w.put_vec(sol.pair.m().values());
  for (int k = 0; k < g.dim; ++k) w.put_vec(sol.pair.w().component(k));
  w.put_vec(sol.u.u.values());
  for (int k = 0; k < g.dim; ++k) w.put_bytes(sol.u.mask.central[k]);
  w.put<std::uint64_t>(sol.history.size());
  for (double x : sol.history) w.put(x);
  return w.take();
}

MfgSolution deserialize_solution(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) throw FormatError("not a solution file");
  const int dim = r.get<std::int32_t>();
  const int N = r.get<std::int32_t>();
  const double L = r.get<double>();
  Grid g;
  try {
    g = make_grid(dim, L, N);
  } catch (const Error& e) {
    throw FormatError(std::string("invalid grid header: ") + e.what());
  }
  MfgSolution sol;
  try {
    const double rp = r.get<double>();
    const double ch = r.get<double>();
    sol.ham = HamiltonianSpec::make(rp, ch);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid Hamiltonian header: ") + e.what());
  }
  sol.alpha = r.get<double>();
  const double mass = r.get<double>();
  sol.lambda = r.get<double>();
  sol.energy = r.get<double>();
  sol.residual = r.get<double>();
  sol.coupling = r.get<double>();
  sol.iterations = r.get<std::int32_t>();
  sol.converged = r.get<std::uint8_t>() != 0;
  sol.potential_free = r.get<std::uint8_t>() != 0;
  sol.u.lambda = r.get<double>();
  sol.u.residual_norm = r.get<double>();
  sol.u.iterations = r.get<std::int32_t>();
  const auto closure = r.get<std::uint8_t>();
  if (closure > 2) throw FormatError("unknown closure tag");
  sol.u.mask.closure = static_cast<Closure>(closure);
  sol.u.normalization = r.get<std::uint8_t>() == 0 ? "min-zero" : "dirichlet-zero";
  const std::size_t n = g.size();
  try {
    ScalarField m(g, r.get_vec(n));
    std::array<std::vector<double>, 2> w;
    for (int k = 0; k < dim; ++k) w[k] = r.get_vec(n);
    sol.pair = FlowPair(std::move(m), VectorField(g, std::move(w)));
    sol.u.u = ScalarField(g, r.get_vec(n));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("invalid payload: ") + e.what());
  }
  for (int k = 0; k < dim; ++k) sol.u.mask.central[k] = r.get_bytes(n);
  const auto nh = r.get<std::uint64_t>();
  r.need(nh * sizeof(double));
  sol.history.resize(nh);
  for (auto& x : sol.history) x = r.get<double>();
  if (!r.done()) throw FormatError("trailing bytes after solution payload");
  if (std::abs(sol.mass() - mass) > 1e-12 * std::max(1.0, mass)) throw FormatError("stored mass disagrees with payload");
  return sol;
}

void save_solution(const std::filesystem::path& path, const MfgSolution& sol) {
  write_atomic(path, serialize_solution(sol));
}

MfgSolution load_solution(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot read solution file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_solution(ss.str());
}

MfgSolution load_solution(const std::filesystem::path& path, const Grid& expected) {
  MfgSolution sol = load_solution(path);
  if (sol.grid() != expected) throw FormatError("stored grid does not match the configured grid");
  return sol;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

void CsvTable::add(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_cells(std::move(cells));
}

void CsvTable::add_cells(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw Error("CSV row width does not match the header");
  rows.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series, bool logx, bool logy) {
  constexpr double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 55;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && !(s.x[i] > 0)) || (logy && !(s.y[i] > 0)) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W, H);
  s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", W / 2, title);
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", ml, mt,
                   W - ml - mr, H - mt - mb);
  auto tick = [](double v, bool lg) { return lg ? fmt::format("1e{:.2g}", v) : fmt::format("{:.3g}", v); };
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + k * (x1 - x0) / 4, fy = y0 + k * (y1 - y0) / 4;
    const double X = ml + k * (W - ml - mr) / 4, Y = H - mb - k * (H - mt - mb) / 4;
    s += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", X, H - mb + 16, tick(fx, logx));
    s += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", ml - 6, Y + 4, tick(fy, logy));
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (W + ml - mr) / 2, H - 12, xlabel);
  s += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                   (H + mt - mb) / 2, (H + mt - mb) / 2, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* c = colors[k % 5];
    std::string pts;
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if ((logx && !(sr.x[i] > 0)) || (logy && !(sr.y[i] > 0)) || !std::isfinite(sr.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(sr.x[i]), py(sr.y[i]));
      if (sr.markers)
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(sr.x[i]), py(sr.y[i]), c);
    }
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", c, pts);
    s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", W - mr - 150, mt + 16 + 16 * k, c, sr.label);
  }
  s += "</svg>\n";
  return s;
}

}  // namespace mfg
