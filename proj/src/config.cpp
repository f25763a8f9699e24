#include "lightcone/config.hpp"

#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>
#include <vector>

namespace lightcone {

std::map<std::string, double> RunConfig::default_tolerances() {
  return {{"group", 1e-10},          {"cone", 1e-8},
          {"normalization", 1e-8},   {"pattern", 1e-7},
          {"invariant", 1e-8},       {"equivariance", 1e-8},
          {"moebius", 1e-10},        {"correspondence", 1e-6},
          {"calibration", 1e-4},     {"operator", 1e-12},
          {"adjoint", 1e-10},        {"jacobi", 1e-9},
          {"gradient", 1e-7},        {"conservation", 1e-8},
          {"tangency", 1e-9},        {"realization", 1e-4},
          {"k0_rate", 1e-7},         {"stationary", 1e-8},
          {"flow_correspondence", 1e-4}, {"shape", 1e-6},
          {"reconstruction", 1e-6},  {"lie_group", 1e-11},
          {"monodromy_group", 1e-10}, {"spectral_pairing", 1e-8},
          {"isospectral", 1e-6},     {"congruence", 1e-7}};
}

double RunConfig::tol(const std::string& key) const {
  auto it = tolerances.find(key);
  if (it != tolerances.end()) return it->second;
  auto d = default_tolerances();
  auto jt = d.find(key);
  if (jt == d.end()) throw InvalidArgument("unknown tolerance key '" + key + "'");
  return jt->second;
}

double RunConfig::resolved_length() const {
  if (length > 0) return length;
  return initial.kind == "soliton" ? 40.0 : 2 * std::numbers::pi;
}

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  throw SchemaError("config: " + where + " " + what);
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) schema_fail(where, "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) schema_fail(where, "has unknown key '" + it.key() + "'");
}

double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) schema_fail(where, "must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) schema_fail(where, "must be finite");
  return v;
}

long long integer(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_fail(where, "must be an integer");
  return j.get<long long>();
}

std::string one_of(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_string()) schema_fail(where, "must be a string");
  auto s = j.get<std::string>();
  if (!allowed.count(s)) schema_fail(where, "has invalid value '" + s + "'");
  return s;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> keys{"n_points", "length", "diff_method", "scheme",   "dt",
                                          "t_end",    "tolerances", "seed",     "calibration", "outputs",
                                          "substeps", "equivariance_samples", "initial"};
  reject_unknown(j, keys, "root");
  RunConfig c;
  if (j.contains("n_points")) {
    long long n = integer(j["n_points"], "n_points");
    if (n < 16 || n % 2) schema_fail("n_points", "must be an even integer >= 16");
    c.n_points = (int)n;
  }
  auto nonneg = [&](const char* k, double& out) {
    if (!j.contains(k)) return;
    out = number(j[k], k);
    if (out < 0) schema_fail(k, "must be >= 0");
  };
  nonneg("length", c.length);
  nonneg("dt", c.dt);
  nonneg("t_end", c.t_end);
  if (j.contains("diff_method")) c.diff_method = one_of(j["diff_method"], {"spectral", "fd4"}, "diff_method");
  if (j.contains("scheme")) c.scheme = one_of(j["scheme"], {"ifrk4", "rk4"}, "scheme");
  if (j.contains("tolerances")) {
    auto defaults = default_tolerances();
    std::set<std::string> known;
    for (auto& [k, v] : defaults) known.insert(k);
    reject_unknown(j["tolerances"], known, "tolerances");
    for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
      double v = number(it.value(), "tolerances." + it.key());
      if (!(v > 0)) schema_fail("tolerances." + it.key(), "must be > 0");
      c.tolerances[it.key()] = v;
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) schema_fail("seed", "must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("calibration")) {
    if (!j["calibration"].is_string()) schema_fail("calibration", "must be a string");
    c.calibration = j["calibration"].get<std::string>();
  }
  auto positive_int = [&](const char* k, int& out) {
    if (!j.contains(k)) return;
    long long v = integer(j[k], k);
    if (v < 1) schema_fail(k, "must be >= 1");
    out = (int)v;
  };
  positive_int("outputs", c.outputs);
  positive_int("substeps", c.substeps);
  positive_int("equivariance_samples", c.equivariance_samples);
  if (j.contains("initial")) {
    const auto& ini = j["initial"];
    reject_unknown(ini, {"kind", "curve", "amplitude", "beta", "center", "k1", "k2"}, "initial");
    if (ini.contains("kind")) c.initial.kind = one_of(ini["kind"], {"curve", "soliton", "constant"}, "initial.kind");
    if (ini.contains("curve")) {
      auto names = curves::names();
      c.initial.curve = one_of(ini["curve"], std::set<std::string>(names.begin(), names.end()), "initial.curve");
    }
    if (ini.contains("amplitude")) c.initial.amplitude = number(ini["amplitude"], "initial.amplitude");
    if (ini.contains("beta")) {
      c.initial.beta = number(ini["beta"], "initial.beta");
      if (!(c.initial.beta > 0)) schema_fail("initial.beta", "must be > 0");
    }
    if (ini.contains("center")) c.initial.center = number(ini["center"], "initial.center");
    if (ini.contains("k1")) c.initial.k1 = number(ini["k1"], "initial.k1");
    if (ini.contains("k2")) c.initial.k2 = number(ini["k2"], "initial.k2");
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::string text = io::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("config: " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json tol_json = nlohmann::json::object();
  for (auto& [k, v] : default_tolerances()) tol_json[k] = tol(k);
  return {{"n_points", n_points},
          {"length", resolved_length()},
          {"diff_method", diff_method},
          {"scheme", scheme},
          {"dt", dt},
          {"t_end", t_end},
          {"tolerances", tol_json},
          {"seed", seed},
          {"calibration", calibration},
          {"outputs", outputs},
          {"substeps", substeps},
          {"equivariance_samples", equivariance_samples},
          {"initial",
           {{"kind", initial.kind},
            {"curve", initial.curve},
            {"amplitude", initial.amplitude},
            {"beta", initial.beta},
            {"center", initial.center},
            {"k1", initial.k1},
            {"k2", initial.k2}}}};
}

std::string RunConfig::hash() const {
  std::string s = to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

void RunConfig::set_tolerance(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidArgument("--tol expects KEY=VAL, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq), val = assignment.substr(eq + 1);
  tol(key);
  double v;
  try {
    size_t used = 0;
    v = std::stod(val, &used);
    if (used != val.size()) throw std::invalid_argument(val);
  } catch (const std::exception&) {
    throw InvalidArgument("--tol " + key + ": '" + val + "' is not a number");
  }
  if (!(v > 0) || !std::isfinite(v)) throw InvalidArgument("--tol " + key + " must be positive");
  tolerances[key] = v;
}

int thread_count() {
  int hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TOOLKIT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(v, hw * 4);
  }
  return hw;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lightcone
