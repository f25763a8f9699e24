#pragma once

#include "lightcone/correspondence.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace lightcone::io {

// Writes to "<path>.tmp" and renames over path.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Throws SchemaError when the header differs from `expected` or a row is malformed.
Table read_csv(const std::string& path, const std::vector<std::string>& expected);
std::string format_csv(const Table& t);

// Grid is recovered from the x column: N rows, uniform spacing from 0, L = N·dx.
PeriodicGrid grid_from_x(const std::vector<double>& x, const std::string& path);

ConeCurve read_cone_csv(const std::string& path);
SphereCurve read_sphere_csv(const std::string& path);
std::string cone_csv(const ConeCurve& c);
std::string sphere_csv(const SphereCurve& c);
void write_cone_csv(const std::string& path, const ConeCurve& c);
void write_sphere_csv(const std::string& path, const SphereCurve& c);

// The k0 column may be absent when assume_unit_speed is set.
ConeInvariants read_cone_invariants_csv(const std::string& path, bool assume_unit_speed = false);
std::string cone_invariants_csv(const ConeInvariants& k);
std::string sphere_invariants_csv(const SphereInvariants& k);

std::string grid_function_csv(const GridFunction& f);
nlohmann::json grid_function_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);

nlohmann::json matrix_json(const Mat4& m);  // row-major nested arrays
Mat4 matrix_from_json(const nlohmann::json& j);

}  // namespace lightcone::io
