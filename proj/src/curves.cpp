#include "lightcone/curves.hpp"

#include "lightcone/errors.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace lightcone::curves {

namespace {

const std::map<std::string, std::function<Vec2(double)>>& table() {
  static const std::map<std::string, std::function<Vec2(double)>> t = {
      {"circle", [](double x) { return Vec2(std::cos(x), std::sin(x)); }},
      {"circle_speed2", [](double x) { return Vec2(std::cos(2 * x), std::sin(2 * x)); }},
      {"ellipse", [](double x) { return Vec2(1.5 * std::cos(x), std::sin(x)); }},
      {"perturbed_circle",
       [](double x) { return Vec2(std::cos(x) + 0.1 * std::cos(2 * x), std::sin(x) + 0.05 * std::sin(3 * x)); }},
      {"lissajous", [](double x) { return Vec2(std::cos(x), std::sin(x) + 0.3 * std::sin(2 * x)); }},
      {"figure_eight", [](double x) { return Vec2(std::cos(x), std::sin(2 * x)); }},
  };
  return t;
}

}  // namespace

SphereCurve sphere(const std::string& name, int n) {
  auto it = table().find(name);
  if (it == table().end()) throw InvalidArgument("unknown test curve '" + name + "'");
  PeriodicGrid g(n, 2 * std::numbers::pi);
  std::vector<Vec2> s(n);
  for (int j = 0; j < n; ++j) s[j] = it->second(g.node(j));
  return SphereCurve(g, std::move(s));
}

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : table()) out.push_back(k);
  return out;
}

std::vector<std::string> calibration_suite() {
  return names();
}

SphereCurve perturbed_circle(int n, double amplitude) {
  PeriodicGrid g(n, 2 * std::numbers::pi);
  std::vector<Vec2> s(n);
  for (int j = 0; j < n; ++j) {
    double x = g.node(j);
    Vec2 d(std::cos(2 * x) + 0.5 * std::sin(3 * x), 0.7 * std::sin(2 * x) - 0.3 * std::cos(3 * x));
    s[j] = Vec2(std::cos(x), std::sin(x)) + amplitude * d;
  }
  return SphereCurve(g, std::move(s));
}

}  // namespace lightcone::curves
