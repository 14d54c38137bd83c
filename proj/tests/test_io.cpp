#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "gnhp/io.hpp"

using gnhp::KeyValueConfig;

TEST_CASE("key=value text parses with comments and typed getters") {
  auto cfg = KeyValueConfig::parse(
      "# solver knobs\n"
      "n_starts = 4\n"
      "loglik_rel_tol=1e-7\n"
      "update_memberships = false\n"
      "\n"
      "name = run-a\n");
  CHECK(cfg.has("n_starts"));
  CHECK(cfg.get_int("n_starts", 0) == 4);
  CHECK(cfg.get_double("loglik_rel_tol", 0.0) == doctest::Approx(1e-7));
  CHECK(cfg.get_bool("update_memberships", true) == false);
  CHECK(cfg.get_string("name", "") == "run-a");
  CHECK(cfg.get_int("missing", 9) == 9);
  CHECK(cfg.get_string("missing", "dflt") == "dflt");
}

TEST_CASE("single-level json objects parse too") {
  auto cfg = KeyValueConfig::parse(
      R"({"num_basis": 24, "rate_upper": 50.5, "flag": true, "s": "x"})");
  CHECK(cfg.get_int("num_basis", 0) == 24);
  CHECK(cfg.get_double("rate_upper", 0.0) == doctest::Approx(50.5));
  CHECK(cfg.get_bool("flag", false) == true);
  CHECK(cfg.get_string("s", "") == "x");
}

TEST_CASE("config files load from disk") {
  const char* path = "cfg_test.txt";
  {
    std::ofstream out(path);
    out << "seed=99\nrefine_rounds=2\n";
  }
  auto cfg = KeyValueConfig::load(path);
  CHECK(cfg.get_int("seed", 0) == 99);
  CHECK(cfg.get_int("refine_rounds", 0) == 2);
  std::remove(path);
  CHECK_THROWS(KeyValueConfig::load("no_such_config_file.txt"));
}
