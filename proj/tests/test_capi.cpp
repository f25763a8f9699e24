#include "lightcone/lightcone.h"

#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

std::string data(const char* name) {
  const char* d = std::getenv("LC_TEST_DATA");
  return std::string(d ? d : "tests/data") + "/" + name;
}

std::string work(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "lc_capi_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

struct Config {
  lc_config* c = nullptr;
  Config() { REQUIRE(lc_config_new(&c) == LC_OK); }
  ~Config() { lc_config_free(c); }
};

}  // namespace

TEST_CASE("config handles") {
  Config cfg;
  std::string h0 = lc_config_hash(cfg.c);
  CHECK(h0.size() == 16);
  CHECK(lc_config_set(cfg.c, "n", "64") == LC_OK);
  CHECK(std::string(lc_config_hash(cfg.c)) != h0);
  CHECK(std::strstr(lc_config_json(cfg.c), "\"n_points\": 64") != nullptr);
  CHECK(lc_config_set(cfg.c, "n", "sixty") == LC_INVALID_ARGUMENT);
  CHECK(lc_config_set(cfg.c, "n", "15") == LC_INVALID_ARGUMENT);
  CHECK(lc_config_set(cfg.c, "colour", "red") == LC_INVALID_ARGUMENT);
  CHECK(std::strlen(lc_last_error()) > 0);
  CHECK(lc_config_set_tolerance(cfg.c, "group=1e-9") == LC_OK);
  CHECK(lc_config_set_tolerance(cfg.c, "bogus=1") == LC_INVALID_ARGUMENT);
  lc_config* bad = nullptr;
  CHECK(lc_config_from_json("{\"bogus\": 1}", &bad) == LC_SCHEMA);
  CHECK(lc_config_from_json("{not json", &bad) == LC_SCHEMA);
  CHECK(bad == nullptr);
  CHECK(lc_config_load(data("bad_config.json").c_str(), &bad) == LC_SCHEMA);
  CHECK(lc_config_load(data("soliton.json").c_str(), &bad) == LC_OK);
  lc_config_free(bad);
  CHECK(lc_config_new(nullptr) == LC_INVALID_ARGUMENT);
  CHECK(std::string(lc_status_name(LC_GUARD)) == "guard");
}

TEST_CASE("invariants, lift and project") {
  Config cfg;
  lc_report* r = nullptr;
  auto lift = work("lift.csv");
  REQUIRE(lc_cmd_lift(cfg.c, data("circle_sphere.csv").c_str(), lift.c_str(), &r) == LC_OK);
  lc_report_free(r);
  r = nullptr;
  auto k = work("k.csv");
  REQUIRE(lc_cmd_invariants(cfg.c, lift.c_str(), "cone", k.c_str(), &r) == LC_OK);
  CHECK(std::strstr(lc_report_json(r), "frame_residuals") != nullptr);
  lc_report_free(r);
  CHECK(std::filesystem::exists(k + ".json"));
  auto back = work("back.csv");
  CHECK(lc_cmd_project(cfg.c, lift.c_str(), back.c_str(), nullptr) == LC_OK);
  CHECK(lc_cmd_invariants(cfg.c, lift.c_str(), "plane", k.c_str(), nullptr) == LC_INVALID_ARGUMENT);
}

TEST_CASE("error codes carry the failure") {
  Config cfg;
  auto out = work("x.csv");
  CHECK(lc_cmd_invariants(cfg.c, data("radial_cone.csv").c_str(), "cone", out.c_str(), nullptr) == LC_GEOMETRY);
  CHECK(std::strstr(lc_last_error(), "node 0") != nullptr);
  CHECK(lc_cmd_invariants(cfg.c, data("bad_header.csv").c_str(), "sphere", out.c_str(), nullptr) == LC_SCHEMA);
  CHECK(lc_cmd_invariants(cfg.c, data("missing.csv").c_str(), "sphere", out.c_str(), nullptr) == LC_IO);
  CHECK(lc_cmd_reconstruct(cfg.c, data("nonfinite_invariants.csv").c_str(), "identity", 0, out.c_str(), nullptr) ==
        LC_GEOMETRY);
  CHECK(lc_cmd_calibrate(cfg.c, "circle", nullptr, nullptr, nullptr) == LC_CALIBRATION);
  CHECK(lc_cmd_flow(cfg.c, "heat", nullptr, nullptr, work("f").c_str(), nullptr) == LC_INVALID_ARGUMENT);
  CHECK(lc_cmd_verify(cfg.c, "nope", nullptr, nullptr) == LC_INVALID_ARGUMENT);
  lc_config* unstable = nullptr;
  REQUIRE(lc_config_load(data("unstable.json").c_str(), &unstable) == LC_OK);
  CHECK(lc_cmd_flow(unstable, "kdv", nullptr, nullptr, work("unstable").c_str(), nullptr) == LC_GUARD);
  CHECK(std::strstr(lc_last_error(), "t = ") != nullptr);
  lc_config_free(unstable);
}

TEST_CASE("reconstruct and verify through the C API") {
  Config cfg;
  lc_report* r = nullptr;
  auto out = work("rec.csv");
  REQUIRE(lc_cmd_reconstruct(cfg.c, data("circle_invariants.csv").c_str(), "chart", 0, out.c_str(), &r) == LC_OK);
  CHECK(std::strstr(lc_report_json(r), "eigenvalues") != nullptr);
  lc_report_free(r);
  REQUIRE(lc_config_set(cfg.c, "n", "64") == LC_OK);
  r = nullptr;
  CHECK(lc_cmd_verify(cfg.c, "operators", nullptr, &r) == LC_OK);
  CHECK(std::strstr(lc_report_summary(r), "checks passed") != nullptr);
  lc_report_free(r);
  REQUIRE(lc_config_set_tolerance(cfg.c, "operator=1e-300") == LC_OK);
  r = nullptr;
  CHECK(lc_cmd_verify(cfg.c, "operators", nullptr, &r) == LC_VERIFY_FAILED);
  CHECK(std::strstr(lc_report_summary(r), "FAIL operators.") != nullptr);
  lc_report_free(r);
}
