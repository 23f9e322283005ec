#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mslab/experiments.hpp"
#include "mslab/metrics.hpp"

using namespace mslab;

TEST_CASE("config parsing and validation") {
  ExperimentConfig cfg;
  cfg.set("n_list", "16,64,256");
  cfg.set("gamma", "inf");
  cfg.set("trials", "7");
  cfg.set("families", "grid,random");
  CHECK(cfg.n_list == std::vector<int>{16, 64, 256});
  CHECK(std::isinf(cfg.gamma));
  CHECK(cfg.trials == 7);
  CHECK(cfg.families.size() == 2);
  CHECK_NOTHROW(cfg.validate());

  cfg.set("n_list", "64,64");
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("bogus", "1"), std::invalid_argument);

  // config hash is sensitive to values
  ExperimentConfig a, b;
  b.seed = a.seed + 1;
  CHECK(config_hash(a.to_map()) != config_hash(b.to_map()));
}

TEST_CASE("csv serialization schema") {
  CsvTable t;
  t.meta["seed"] = "11";
  t.meta["config"] = "aa";
  t.columns = {"n", "value"};
  t.add_row({std::int64_t(4), 0.25});
  std::string s = t.serialize();
  CHECK(s.rfind("# ", 0) == 0);
  CHECK(s.find("seed=11") != std::string::npos);
  CHECK(s.find("n,value\n") != std::string::npos);
  CHECK(s.find("4,0.25\n") != std::string::npos);
  CHECK(s.find('\r') == std::string::npos);  // LF only
  CHECK_THROWS_AS(t.add_row({0.1}), std::invalid_argument);
}

TEST_CASE("grid rate study hits the optimal exponent") {
  ExperimentConfig cfg;
  cfg.experiment = "rates";
  cfg.manifold = "T2";
  cfg.n_list = {16, 64, 256};
  cfg.families = {"grid"};
  cfg.gamma = 2.0;
  cfg.alpha = 1.0;
  cfg.trials = 1;
  cfg.resolution = 384;
  ExperimentReport report = run_rates(cfg);
  double slope = std::stod(report.summary.at("slope_grid"));
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.04));
}

TEST_CASE("limit theorem study on the torus at small scale") {
  ExperimentConfig cfg;
  cfg.experiment = "limit-theorem";
  cfg.manifold = "T2";
  cfg.n_list = {256};
  cfg.trials = 40;
  cfg.seed = 5;
  Manifold t2 = Manifold::flat_torus(2);
  CHECK(limit_theorem_constant(t2, 2.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  CHECK(limit_theorem_constant(Manifold::sphere(2), 2.0) ==
        doctest::Approx(16.0 * M_PI).epsilon(1e-12));
  ExperimentReport report = run_limit_theorem(cfg);
  CHECK(std::stod(report.summary.at("rel_dev_final")) < 0.2);

  cfg.gamma = inf;
  CHECK_THROWS_AS(run_limit_theorem(cfg), std::invalid_argument);
}

TEST_CASE("emit writes deterministic files") {
  ExperimentConfig cfg;
  cfg.experiment = "rates";
  cfg.manifold = "T2";
  cfg.n_list = {16, 64};
  cfg.families = {"grid"};
  cfg.trials = 1;
  cfg.resolution = 128;
  cfg.seed = 9;
  ExperimentReport r1 = run_rates(cfg);
  ExperimentReport r2 = run_rates(cfg);

  auto dir = std::filesystem::temp_directory_path() / "mslab_emit_test";
  std::filesystem::remove_all(dir);
  auto files1 = emit(r1, (dir / "a").string());
  auto files2 = emit(r2, (dir / "b").string());
  REQUIRE(files1.size() == files2.size());
  for (std::size_t i = 0; i < files1.size(); ++i) {
    std::ifstream f1(files1[i], std::ios::binary), f2(files2[i], std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(!s1.empty());
  }
  // CSV row count: |n_list| x |families|
  std::ifstream table(files1[0]);
  int lines = 0;
  std::string line;
  bool has_seed_key = false;
  while (std::getline(table, line)) {
    if (line.find("seed=") != std::string::npos) has_seed_key = true;
    ++lines;
  }
  CHECK(has_seed_key);
  CHECK(lines == 2 + 2 * 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("builtin functions") {
  Manifold s2 = Manifold::sphere(2);
  Point north(3);
  north << 0, 0, 1;
  CHECK(builtin_function(s2, "one")(north) == 1.0);
  CHECK(builtin_function(s2, "coord3")(north) == 1.0);
  CHECK(builtin_function(s2, "exp3")(north) == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(builtin_function(s2, "nope"), std::invalid_argument);
}
