#include "lightcone/correspondence.hpp"
#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>

using namespace lightcone;

TEST_CASE("lift and projection are inverse") {
  for (const auto& name : curves::names()) {
    auto m = curves::sphere(name, 128);
    auto u = lift_arclength(m);
    auto back = project(u);
    for (int j = 0; j < m.size(); ++j) CHECK((back.samples[j] - m.samples[j]).norm() < 1e-13);
    for (const auto& v : u.samples) CHECK(cone_residual(v) < 1e-12);
  }
}

TEST_CASE("arc-length lift has k0 = 1") {
  auto j = lift_arclength_jets(curves::sphere("figure_eight", 256));
  auto k = cone_invariants_closed_form(j, ConeFormula::general);
  for (int i = 0; i < k.k0.size(); ++i) CHECK(std::abs(k.k0[i] - 1.0) < 1e-10);
}

TEST_CASE("one global sign vector; calibration is deterministic") {
  auto a = calibrate(curves::calibration_suite(), {128, 256, 512});
  auto b = calibrate(curves::calibration_suite(), {128, 256, 512});
  CHECK(a.same_signs(b));
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.max_dev < 1e-6);
  CHECK(a.sigma_cone == Signs{1, 1});
  CHECK(a.sigma_sphere == Signs{-1, 1});
  CHECK(a.sigma_corr == Signs{1, 1});
  for (const auto& name : curves::names()) {
    auto rep = match_invariants(curves::sphere(name, 256), a);
    INFO(name);
    CHECK(std::max(rep.abs_dev[0], rep.abs_dev[1]) < 1e-6);
    CHECK(std::max(rep.signed_dev[0], rep.signed_dev[1]) < 1e-6);
  }
}

TEST_CASE("calibration file round trip") {
  auto a = calibrate(curves::calibration_suite(), {128});
  auto path = (std::filesystem::temp_directory_path() / "lc_cal_test.json").string();
  a.save(path);
  auto b = SignCalibration::load(path);
  CHECK(a.same_signs(b));
  std::remove(path.c_str());
  CHECK_THROWS_AS(SignCalibration::load(path), Error);
}

TEST_CASE("calibration needs enough curves") {
  try {
    calibrate(std::vector<std::string>{"circle"}, {128, 256});
    FAIL("single curve accepted");
  } catch (const CalibrationError& e) {
    CHECK(e.fault() == CalibrationFault::insufficient);
  }
}
