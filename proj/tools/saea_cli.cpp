// Command-line front end; talks to the library only through saea.h.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "saea/saea.h"

namespace {

int report(saea_status status) {
  if (status == SAEA_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", saea_status_string(status), saea_last_error());
  return static_cast<int>(status);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate-assisted multi-objective optimization experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool force = false;
  std::size_t workers = 1;
  auto* run = app.add_subcommand("run", "Run every missing cell of an experiment matrix");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Directory for run records")->required();
  run->add_flag("--force", force, "Recompute records that already exist");
  run->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string in_dir, summary_path;
  auto* summarize = app.add_subcommand("summarize", "Median/std IGD table with rank-sum markers");
  summarize->add_option("--in", in_dir, "Directory of run records")->required();
  summarize->add_option("--out", summary_path, "Summary CSV path")->required();

  std::string record_path, front_path;
  auto* front = app.add_subcommand("front", "Final archive and reference front of one run as CSV");
  front->add_option("--record", record_path, "Run record")->required()->check(CLI::ExistingFile);
  front->add_option("--out", front_path, "Front CSV path")->required();

  std::string problem_1d = "forrester", acq = "ei";
  std::size_t budget = 30;
  double kappa = 2.0;
  bool literal_variance = false;
  std::uint64_t seed = 1;
  auto* single = app.add_subcommand("saea-single", "Single-objective GP-assisted EA on a 1-D function");
  single->add_option("--problem-1d", problem_1d, "quadratic or forrester")->capture_default_str();
  single->add_option("--budget", budget, "Function evaluations")->capture_default_str();
  single->add_option("--acq", acq, "Acquisition function")
      ->check(CLI::IsMember({"pi", "ei", "ucb"}))
      ->capture_default_str();
  single->add_option("--kappa", kappa, "UCB exploration weight")->capture_default_str();
  single->add_flag("--literal-variance", literal_variance, "Use the variance where the standard deviation belongs");
  single->add_option("--seed", seed, "Random seed (SAEA_SEED overrides)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    std::size_t computed = 0, skipped = 0;
    const int rc = report(saea_experiment_run(config_path.c_str(), out_dir.c_str(), force, workers, &computed, &skipped));
    if (rc == 0) std::printf("computed %zu run(s), skipped %zu existing\n", computed, skipped);
    return rc;
  }
  if (*summarize) {
    std::size_t rows = 0;
    const int rc = report(saea_summarize(in_dir.c_str(), summary_path.c_str(), &rows));
    if (rc == 0) std::printf("wrote %zu row(s) to %s\n", rows, summary_path.c_str());
    return rc;
  }
  if (*front) return report(saea_emit_front(record_path.c_str(), front_path.c_str()));

  if (const char* env = std::getenv("SAEA_SEED"); env && *env) {
    char* end = nullptr;
    seed = std::strtoull(env, &end, 10);
    if (*end != '\0') {
      std::fprintf(stderr, "error (config-error): SAEA_SEED is not an unsigned integer\n");
      return SAEA_CONFIG;
    }
  }
  double best_x = 0.0, best_value = 0.0;
  const int rc = report(saea_single_run(problem_1d.c_str(), budget, acq.c_str(), kappa, literal_variance, seed,
                                        &best_x, &best_value));
  if (rc == 0) std::printf("best_x=%s best_f=%s\n", sci(best_x).c_str(), sci(best_value).c_str());
  return rc;
}
