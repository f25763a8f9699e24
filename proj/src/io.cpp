#include "lightcone/io.hpp"

#include "lightcone/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lightcone::io {

void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) {
    size_t a = cell.find_first_not_of(" \t\r");
    size_t b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

}  // namespace

Table read_csv(const std::string& path, const std::vector<std::string>& expected) {
  std::istringstream in(read_file(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  t.header = split(line);
  if (t.header != expected)
    throw SchemaError(path + ": header '" + join(t.header) + "' does not match '" + join(expected) + "'");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (cells.size() != expected.size())
      throw SchemaError(path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                        " fields, expected " + std::to_string(expected.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        size_t used = 0;
        double v = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
        row.push_back(v);
      } catch (const std::exception&) {
        throw SchemaError(path + ": line " + std::to_string(lineno) + ": '" + c + "' is not a number");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string format_csv(const Table& t) {
  std::ostringstream s;
  s << join(t.header) << "\n";
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << num(r[i]);
    s << "\n";
  }
  return s.str();
}

PeriodicGrid grid_from_x(const std::vector<double>& x, const std::string& path) {
  int n = static_cast<int>(x.size());
  if (n < 16 || n % 2) throw SchemaError(path + ": need an even number (>= 16) of rows, got " + std::to_string(n));
  double dx = x[1] - x[0];
  if (std::abs(x[0]) > 1e-12 * std::max(1.0, std::abs(dx)) || !(dx > 0))
    throw SchemaError(path + ": x column must start at 0 and increase");
  for (int j = 0; j < n; ++j)
    if (std::abs(x[j] - j * dx) > 1e-9 * std::max(1.0, n * dx))
      throw SchemaError(path + ": x column is not uniform at row " + std::to_string(j + 1));
  return PeriodicGrid(n, n * dx);
}

ConeCurve read_cone_csv(const std::string& path) {
  auto t = read_csv(path, {"x", "u0", "u1", "u2", "u3"});
  std::vector<double> x;
  std::vector<Vec4> s;
  for (auto& r : t.rows) {
    x.push_back(r[0]);
    s.emplace_back(r[1], r[2], r[3], r[4]);
  }
  return ConeCurve(grid_from_x(x, path), std::move(s));
}

SphereCurve read_sphere_csv(const std::string& path) {
  auto t = read_csv(path, {"x", "m1", "m2"});
  std::vector<double> x;
  std::vector<Vec2> s;
  for (auto& r : t.rows) {
    x.push_back(r[0]);
    s.emplace_back(r[1], r[2]);
  }
  return SphereCurve(grid_from_x(x, path), std::move(s));
}

std::string cone_csv(const ConeCurve& c) {
  Table t{{"x", "u0", "u1", "u2", "u3"}, {}};
  for (int j = 0; j < c.size(); ++j) {
    const Vec4& u = c.samples[j];
    t.rows.push_back({c.grid.node(j), u[0], u[1], u[2], u[3]});
  }
  return format_csv(t);
}

std::string sphere_csv(const SphereCurve& c) {
  Table t{{"x", "m1", "m2"}, {}};
  for (int j = 0; j < c.size(); ++j) t.rows.push_back({c.grid.node(j), c.samples[j][0], c.samples[j][1]});
  return format_csv(t);
}

void write_cone_csv(const std::string& path, const ConeCurve& c) { write_atomic(path, cone_csv(c)); }
void write_sphere_csv(const std::string& path, const SphereCurve& c) { write_atomic(path, sphere_csv(c)); }

ConeInvariants read_cone_invariants_csv(const std::string& path, bool assume_unit_speed) {
  std::string first;
  {
    std::istringstream in(read_file(path));
    std::getline(in, first);
  }
  bool has_k0 = split(first) == std::vector<std::string>{"x", "k0", "k1", "k2"};
  Table t = (has_k0 || !assume_unit_speed) ? read_csv(path, {"x", "k0", "k1", "k2"})
                                            : read_csv(path, {"x", "k1", "k2"});
  std::vector<double> x, k0, k1, k2;
  for (auto& r : t.rows) {
    x.push_back(r[0]);
    k0.push_back(has_k0 ? r[1] : 1.0);
    k1.push_back(r[has_k0 ? 2 : 1]);
    k2.push_back(r[has_k0 ? 3 : 2]);
  }
  for (size_t j = 0; j < x.size(); ++j)
    if (!std::isfinite(k0[j]) || !std::isfinite(k1[j]) || !std::isfinite(k2[j]))
      throw GeometryError(GeometryFault::non_finite, (long)j, "non-finite invariant value");
  PeriodicGrid g = grid_from_x(x, path);
  return ConeInvariants{GridFunction(g, k0), GridFunction(g, k1), GridFunction(g, k2)};
}

std::string cone_invariants_csv(const ConeInvariants& k) {
  Table t{{"x", "k0", "k1", "k2"}, {}};
  for (int j = 0; j < k.k0.size(); ++j) t.rows.push_back({k.k0.grid.node(j), k.k0[j], k.k1[j], k.k2[j]});
  return format_csv(t);
}

std::string sphere_invariants_csv(const SphereInvariants& k) {
  Table t{{"x", "kappa1", "kappa2"}, {}};
  for (int j = 0; j < k.kappa1.size(); ++j) t.rows.push_back({k.kappa1.grid.node(j), k.kappa1[j], k.kappa2[j]});
  return format_csv(t);
}

std::string grid_function_csv(const GridFunction& f) {
  Table t{{"x", "value"}, {}};
  for (int j = 0; j < f.size(); ++j) t.rows.push_back({f.grid.node(j), f[j]});
  return format_csv(t);
}

nlohmann::json grid_function_json(const GridFunction& f) { return {{"L", f.grid.length()}, {"values", f.values}}; }

GridFunction grid_function_from_json(const nlohmann::json& j) {
  try {
    auto v = j.at("values").get<std::vector<double>>();
    return GridFunction(PeriodicGrid((int)v.size(), j.at("L").get<double>()), v);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("grid function JSON: ") + e.what());
  }
}

nlohmann::json matrix_json(const Mat4& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
  return rows;
}

Mat4 matrix_from_json(const nlohmann::json& j) {
  Mat4 m;
  try {
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = j.at(r).at(c).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("matrix JSON: ") + e.what());
  }
  return m;
}

}  // namespace lightcone::io
