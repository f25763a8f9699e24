#include "lightcone/errors.hpp"
#include "lightcone/verify.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

using namespace lightcone;

TEST_CASE("operators suite passes at N = 128 and reports every check") {
  RunConfig c;
  c.n_points = 128;
  auto rep = run_verify("operators", c);
  CHECK(rep.pass());
  CHECK(rep.checks.size() > 10);
  auto j = rep.to_json(c);
  CHECK(j["config_hash"] == c.hash());
  CHECK(j["n_failed"] == 0);
}

TEST_CASE("corrupted tolerance fails with the check named") {
  RunConfig c;
  c.n_points = 128;
  c.equivariance_samples = 5;
  c.set_tolerance("group=1e-30");
  auto rep = run_verify("frames", c);
  CHECK_FALSE(rep.pass());
  auto f = rep.failures();
  CHECK(std::find(f.begin(), f.end(), "frames.circle.cone.group") != f.end());
}

TEST_CASE("unknown suite") { CHECK_THROWS_AS(run_verify("nope", RunConfig{}), InvalidArgument); }
