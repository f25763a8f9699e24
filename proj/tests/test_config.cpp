#include "lightcone/config.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

using namespace lightcone;

TEST_CASE("defaults and JSON round trip") {
  RunConfig c;
  CHECK(c.n_points == 256);
  CHECK(c.tol("group") == 1e-10);
  auto d = RunConfig::from_json(c.to_json());
  CHECK(d.hash() == c.hash());
  CHECK(c.hash().size() == 16);
  CHECK(c.resolved_length() == doctest::Approx(2 * 3.141592653589793));
}

TEST_CASE("schema violations") {
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"bogus", 1}}), SchemaError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"n_points", 15}}), SchemaError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"scheme", "euler"}}), SchemaError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"tolerances", {{"nope", 1e-3}}}}), SchemaError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json{{"initial", {{"kind", "wave"}}}}), SchemaError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::array()), SchemaError);
}

TEST_CASE("tolerance overrides change the hash") {
  RunConfig c;
  auto h = c.hash();
  c.set_tolerance("group=1e-6");
  CHECK(c.tol("group") == 1e-6);
  CHECK(c.hash() != h);
  CHECK_THROWS_AS(c.set_tolerance("unknown=1"), InvalidArgument);
  CHECK_THROWS_AS(c.set_tolerance("group"), InvalidArgument);
  CHECK_THROWS_AS(c.tol("unknown"), InvalidArgument);
}

TEST_CASE("soliton default length") {
  RunConfig c = RunConfig::from_json(nlohmann::json{{"initial", {{"kind", "soliton"}}}});
  CHECK(c.resolved_length() == 40.0);
}

TEST_CASE("atomic writes and CSV schema") {
  auto dir = std::filesystem::temp_directory_path() / "lc_config_test";
  std::filesystem::create_directories(dir);
  auto p = (dir / "a.csv").string();
  io::write_atomic(p, "x,m1,m2\n0,1,0\n");
  CHECK_FALSE(std::filesystem::exists(p + ".tmp"));
  CHECK_THROWS_AS(io::read_sphere_csv(p), SchemaError);  // too few rows
  io::write_atomic(p, "x,m1\n0,1\n");
  CHECK_THROWS_AS(io::read_sphere_csv(p), SchemaError);
  CHECK_THROWS_AS(io::read_file((dir / "missing.csv").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("thread count honours TOOLKIT_THREADS") {
  setenv("TOOLKIT_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  unsetenv("TOOLKIT_THREADS");
  CHECK(thread_count() >= 1);
  std::vector<int> hit(20, 0);
  parallel_for(20, [&](int i) { hit[i] = 1; });
  for (int h : hit) CHECK(h == 1);
}
