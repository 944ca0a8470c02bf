// Exercises the shared library through the C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "saea/saea.h"

namespace fs = std::filesystem;

TEST_CASE("status strings") {
  CHECK(std::string(saea_status_string(SAEA_OK)) == "ok");
  CHECK(std::string(saea_status_string(SAEA_CONFIG)) == "config-error");
  CHECK(std::string(saea_status_string(SAEA_IO)) == "io-error");
}

TEST_CASE("problem handles") {
  saea_problem* p = nullptr;
  REQUIRE(saea_problem_create("zdt1", 3, 0, &p) == SAEA_OK);
  size_t n = 0, m = 0;
  CHECK(saea_problem_info(p, &n, &m) == SAEA_OK);
  CHECK(n == 3);
  CHECK(m == 2);
  std::vector<double> lo(3), hi(3);
  CHECK(saea_problem_bounds(p, lo.data(), hi.data()) == SAEA_OK);
  CHECK(lo == std::vector<double>{0, 0, 0});
  CHECK(hi == std::vector<double>{1, 1, 1});

  const double x[3] = {0.25, 0.0, 0.0};
  double f[2] = {0, 0};
  CHECK(saea_problem_evaluate(p, x, f) == SAEA_OK);
  CHECK(f[0] == 0.25);
  CHECK(f[1] == doctest::Approx(0.5));

  const double outside[3] = {1.5, 0.0, 0.0};
  CHECK(saea_problem_evaluate(p, outside, f) == SAEA_INVALID_ARGUMENT);
  CHECK(std::string(saea_last_error()).size() > 0);

  std::vector<double> front(20);
  CHECK(saea_problem_sample_front(p, 10, front.data()) == SAEA_OK);
  for (size_t i = 0; i < 10; ++i) CHECK(front[2 * i + 1] == doctest::Approx(1.0 - std::sqrt(front[2 * i])));
  saea_problem_destroy(p);

  saea_problem* d = nullptr;
  REQUIRE(saea_problem_create("dtlz2", 6, 0, &d) == SAEA_OK);
  CHECK(saea_problem_info(d, &n, &m) == SAEA_OK);
  CHECK(m == 3);
  saea_problem_destroy(d);

  saea_problem* bad = reinterpret_cast<saea_problem*>(0x1);
  CHECK(saea_problem_create("zdt9", 3, 0, &bad) == SAEA_UNSUPPORTED);
  CHECK(bad == nullptr);
  CHECK(saea_problem_create("zdt1", 1, 0, &bad) == SAEA_INVALID_ARGUMENT);
  CHECK(saea_problem_create(nullptr, 3, 0, &bad) == SAEA_INVALID_ARGUMENT);
  CHECK(saea_problem_info(nullptr, &n, &m) == SAEA_INVALID_ARGUMENT);
}

TEST_CASE("runs through the C interface") {
  saea_problem* p = nullptr;
  REQUIRE(saea_problem_create("zdt1", 4, 0, &p) == SAEA_OK);
  saea_config* c = nullptr;
  REQUIRE(saea_config_create(&c) == SAEA_OK);
  CHECK(saea_config_set(c, "pop.4", "10") == SAEA_OK);
  CHECK(saea_config_set(c, "budget.4", "30") == SAEA_OK);
  CHECK(saea_config_set(c, "n_init", "12") == SAEA_OK);
  CHECK(saea_config_set(c, "inner_generations", "5") == SAEA_OK);
  CHECK(saea_config_set(c, "colour", "blue") == SAEA_CONFIG);
  CHECK(std::string(saea_last_error()).find("colour") != std::string::npos);
  CHECK(saea_config_set(c, "k_select", "0") == SAEA_CONFIG);

  saea_run* run = nullptr;
  REQUIRE(saea_run_create(p, "saeame", c, 5, &run) == SAEA_OK);
  size_t fes = 0, size = 0;
  CHECK(saea_run_fe_count(run, &fes) == SAEA_OK);
  CHECK(fes == 30);
  CHECK(saea_run_archive_size(run, &size) == SAEA_OK);
  REQUIRE(size > 0);
  std::vector<double> archive(2 * size);
  CHECK(saea_run_archive(run, archive.data()) == SAEA_OK);
  for (size_t i = 0; i < size; ++i) {
    CHECK(archive[2 * i] >= 0.0);
    CHECK(archive[2 * i] <= 1.0);
  }
  double igd = -1.0;
  CHECK(saea_run_igd(run, &igd) == SAEA_OK);
  CHECK(igd > 0.0);

  const fs::path dir = fs::temp_directory_path() / "saea_capi";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string rec = (dir / "run.csv").string();
  CHECK(saea_run_write(run, rec.c_str()) == SAEA_OK);
  const std::string front = (dir / "front.csv").string();
  CHECK(saea_emit_front(rec.c_str(), front.c_str()) == SAEA_OK);
  std::ifstream in(front);
  size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 1 + size + 1000);

  saea_run* again = nullptr;
  REQUIRE(saea_run_create(p, "saeame", c, 5, &again) == SAEA_OK);
  double igd2 = -1.0;
  CHECK(saea_run_igd(again, &igd2) == SAEA_OK);
  CHECK(igd2 == igd);
  saea_run_destroy(again);

  saea_run* rs = nullptr;
  CHECK(saea_run_create(p, "random-search", c, 5, &rs) == SAEA_OK);
  CHECK(saea_run_fe_count(rs, &fes) == SAEA_OK);
  CHECK(fes == 30);
  saea_run_destroy(rs);
  CHECK(saea_run_create(p, "parego", c, 5, &rs) == SAEA_CONFIG);
  CHECK(rs == nullptr);

  saea_run_destroy(run);
  saea_config_destroy(c);
  saea_problem_destroy(p);
}

TEST_CASE("experiment, summary and errors through the C interface") {
  const fs::path dir = fs::temp_directory_path() / "saea_capi_exp";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "exp.cfg") << "problems = zdt1\ndims = 5\nalgorithms = random-search\nrepeats = 5\n"
                                    "pop.5 = 10\nbudget.5 = 40\n";
  size_t computed = 0, skipped = 0, rows = 0;
  const std::string cfg = (dir / "exp.cfg").string(), out = (dir / "out").string();
  CHECK(saea_experiment_run(cfg.c_str(), out.c_str(), 0, 2, &computed, &skipped) == SAEA_OK);
  CHECK(computed == 5);
  CHECK(saea_experiment_run(cfg.c_str(), out.c_str(), 0, 1, &computed, &skipped) == SAEA_OK);
  CHECK(computed == 0);
  CHECK(skipped == 5);
  const std::string summary = (dir / "summary.csv").string();
  CHECK(saea_summarize(out.c_str(), summary.c_str(), &rows) == SAEA_OK);
  CHECK(rows == 1);

  std::ofstream(dir / "bad.cfg") << "problems = zdt1\nwhatever = 3\n";
  const std::string bad = (dir / "bad.cfg").string();
  CHECK(saea_experiment_run(bad.c_str(), out.c_str(), 0, 1, nullptr, nullptr) == SAEA_CONFIG);
  CHECK(saea_experiment_run("/nonexistent.cfg", out.c_str(), 0, 1, nullptr, nullptr) == SAEA_IO);
  const std::string empty = (dir / "empty").string();
  fs::create_directories(empty);
  CHECK(saea_summarize(empty.c_str(), summary.c_str(), nullptr) == SAEA_IO);
  CHECK(std::string(saea_last_error()).size() > 0);
  CHECK(saea_summarize(nullptr, summary.c_str(), nullptr) == SAEA_INVALID_ARGUMENT);
}

TEST_CASE("single-objective demo") {
  double x = 0.0, f = 0.0;
  CHECK(saea_single_run("quadratic", 30, "ei", 2.0, 0, 1, &x, &f) == SAEA_OK);
  CHECK(f == doctest::Approx((x - 0.3) * (x - 0.3)));
  CHECK(f <= 1e-2);
  CHECK(saea_single_run("forrester", 12, "ucb", 2.0, 1, 1, &x, &f) == SAEA_OK);
  CHECK(saea_single_run("branin", 12, "ei", 2.0, 0, 1, &x, &f) == SAEA_UNSUPPORTED);
  CHECK(saea_single_run("quadratic", 12, "lcb", 2.0, 0, 1, &x, &f) == SAEA_INVALID_ARGUMENT);
}
