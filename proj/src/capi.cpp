#include "saea/saea.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "saea/acquisition.hpp"
#include "saea/error.hpp"
#include "saea/harness.hpp"
#include "saea/problems.hpp"
#include "saea/rng.hpp"

struct saea_problem {
  saea::Problem problem;
};

struct saea_config {
  saea::ExperimentConfig config;
};

struct saea_run {
  saea::RunRecord record;
};

namespace {

thread_local std::string last_error;

saea_status status_of(saea::ErrorCode code) {
  switch (code) {
    case saea::ErrorCode::kInvalidArgument:
      return SAEA_INVALID_ARGUMENT;
    case saea::ErrorCode::kUnsupported:
      return SAEA_UNSUPPORTED;
    case saea::ErrorCode::kNumericalFailure:
      return SAEA_NUMERICAL_FAILURE;
    case saea::ErrorCode::kBudgetExceeded:
      return SAEA_BUDGET_EXCEEDED;
    case saea::ErrorCode::kIoError:
      return SAEA_IO;
    case saea::ErrorCode::kConfigError:
      return SAEA_CONFIG;
  }
  return SAEA_INTERNAL;
}

saea_status fail(saea_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
saea_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SAEA_OK;
  } catch (const saea::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SAEA_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SAEA_INTERNAL, e.what());
  } catch (...) {
    return fail(SAEA_INTERNAL, "unknown exception");
  }
}

#define SAEA_REQUIRE_ARG(cond, what)                                   \
  do {                                                                 \
    if (!(cond)) return fail(SAEA_INVALID_ARGUMENT, what " is null");  \
  } while (0)

}  // namespace

extern "C" {

const char* saea_status_string(saea_status status) {
  switch (status) {
    case SAEA_OK:
      return "ok";
    case SAEA_INVALID_ARGUMENT:
      return "invalid-argument";
    case SAEA_UNSUPPORTED:
      return "unsupported";
    case SAEA_NUMERICAL_FAILURE:
      return "numerical-failure";
    case SAEA_BUDGET_EXCEEDED:
      return "budget-exceeded";
    case SAEA_IO:
      return "io-error";
    case SAEA_CONFIG:
      return "config-error";
    case SAEA_INTERNAL:
      return "internal-error";
  }
  return "unknown-status";
}

const char* saea_last_error(void) { return last_error.c_str(); }

saea_status saea_problem_create(const char* id, size_t n, size_t m, saea_problem** out) {
  SAEA_REQUIRE_ARG(id, "problem id");
  SAEA_REQUIRE_ARG(out, "output handle");
  *out = nullptr;
  return guarded([&] {
    const auto pid = saea::parse_problem_id(id);
    *out = new saea_problem{saea::Problem(pid, n, m == 0 ? std::nullopt : std::optional<std::size_t>(m))};
  });
}

void saea_problem_destroy(saea_problem* problem) { delete problem; }

saea_status saea_problem_info(const saea_problem* problem, size_t* n, size_t* m) {
  SAEA_REQUIRE_ARG(problem, "problem");
  if (n) *n = problem->problem.num_variables();
  if (m) *m = problem->problem.num_objectives();
  last_error.clear();
  return SAEA_OK;
}

saea_status saea_problem_bounds(const saea_problem* problem, double* lower, double* upper) {
  SAEA_REQUIRE_ARG(problem, "problem");
  SAEA_REQUIRE_ARG(lower && upper, "bounds buffer");
  const auto& b = problem->problem.bounds();
  std::copy(b.lower.begin(), b.lower.end(), lower);
  std::copy(b.upper.begin(), b.upper.end(), upper);
  last_error.clear();
  return SAEA_OK;
}

saea_status saea_problem_evaluate(const saea_problem* problem, const double* x, double* f) {
  SAEA_REQUIRE_ARG(problem, "problem");
  SAEA_REQUIRE_ARG(x && f, "evaluation buffer");
  return guarded([&] {
    const auto values = problem->problem.evaluate(std::span<const double>(x, problem->problem.num_variables()));
    std::copy(values.begin(), values.end(), f);
  });
}

saea_status saea_problem_sample_front(const saea_problem* problem, size_t count, double* points) {
  SAEA_REQUIRE_ARG(problem, "problem");
  SAEA_REQUIRE_ARG(points, "front buffer");
  return guarded([&] {
    const auto front = saea::reference_front(problem->problem, count);
    for (const auto& p : front.points) points = std::copy(p.begin(), p.end(), points);
  });
}

saea_status saea_config_create(saea_config** out) {
  SAEA_REQUIRE_ARG(out, "output handle");
  *out = nullptr;
  return guarded([&] { *out = new saea_config{}; });
}

saea_status saea_config_set(saea_config* config, const char* key, const char* value) {
  SAEA_REQUIRE_ARG(config, "config");
  SAEA_REQUIRE_ARG(key && value, "key or value");
  // A rejected value leaves the handle untouched.
  return guarded([&] {
    saea::ExperimentConfig next = config->config;
    saea::apply_experiment_value(next, key, value);
    config->config = std::move(next);
  });
}

saea_status saea_config_load(saea_config* config, const char* path) {
  SAEA_REQUIRE_ARG(config, "config");
  SAEA_REQUIRE_ARG(path, "path");
  return guarded([&] { config->config = saea::load_experiment_config(path); });
}

void saea_config_destroy(saea_config* config) { delete config; }

saea_status saea_run_create(const saea_problem* problem, const char* algorithm, const saea_config* config,
                            uint64_t seed, saea_run** out) {
  SAEA_REQUIRE_ARG(problem, "problem");
  SAEA_REQUIRE_ARG(algorithm, "algorithm");
  SAEA_REQUIRE_ARG(out, "output handle");
  *out = nullptr;
  return guarded([&] {
    const saea::ExperimentConfig defaults;
    const auto alg = saea::parse_algorithm(algorithm);
    *out = new saea_run{saea::execute_run(problem->problem, alg, config ? config->config : defaults, seed)};
  });
}

void saea_run_destroy(saea_run* run) { delete run; }

saea_status saea_run_fe_count(const saea_run* run, size_t* count) {
  SAEA_REQUIRE_ARG(run && count, "run or output");
  *count = run->record.log.size();
  last_error.clear();
  return SAEA_OK;
}

saea_status saea_run_archive_size(const saea_run* run, size_t* size) {
  SAEA_REQUIRE_ARG(run && size, "run or output");
  *size = run->record.archive.size();
  last_error.clear();
  return SAEA_OK;
}

saea_status saea_run_archive(const saea_run* run, double* objectives) {
  SAEA_REQUIRE_ARG(run && objectives, "run or output");
  return guarded([&] {
    for (const auto& f : run->record.archive_objectives()) objectives = std::copy(f.begin(), f.end(), objectives);
  });
}

saea_status saea_run_igd(const saea_run* run, double* igd) {
  SAEA_REQUIRE_ARG(run && igd, "run or output");
  if (!run->record.igd) {
    return fail(SAEA_NUMERICAL_FAILURE, "run has no IGD value: " + run->record.status + " " + run->record.diagnostic);
  }
  *igd = *run->record.igd;
  last_error.clear();
  return SAEA_OK;
}

saea_status saea_run_write(const saea_run* run, const char* path) {
  SAEA_REQUIRE_ARG(run && path, "run or path");
  return guarded([&] { saea::write_record(run->record, path); });
}

saea_status saea_experiment_run(const char* config_path, const char* out_dir, int force, size_t workers,
                                size_t* computed, size_t* skipped) {
  SAEA_REQUIRE_ARG(config_path && out_dir, "config path or output directory");
  return guarded([&] {
    const auto config = saea::load_experiment_config(config_path);
    const auto outcome = saea::run_experiment(config, out_dir, force != 0, std::max<size_t>(workers, 1));
    if (computed) *computed = outcome.computed;
    if (skipped) *skipped = outcome.skipped;
  });
}

saea_status saea_summarize(const char* in_dir, const char* out_path, size_t* rows) {
  SAEA_REQUIRE_ARG(in_dir && out_path, "input directory or output path");
  return guarded([&] {
    const auto summary = saea::summarize(in_dir, out_path);
    if (rows) *rows = summary.size();
  });
}

saea_status saea_emit_front(const char* record_path, const char* out_path) {
  SAEA_REQUIRE_ARG(record_path && out_path, "record path or output path");
  return guarded([&] {
    const auto record = saea::read_record(record_path);
    std::size_t pf_points = saea::kDefaultFrontSize;
    for (const auto& [key, value] : record.config)
      if (key == "pf_points") pf_points = static_cast<std::size_t>(std::stoull(value));
    saea::emit_front_csv(record, out_path, pf_points);
  });
}

saea_status saea_single_run(const char* problem_1d, size_t budget, const char* acquisition, double kappa,
                            int literal_variance, uint64_t seed, double* best_x, double* best_value) {
  SAEA_REQUIRE_ARG(problem_1d && acquisition, "problem or acquisition name");
  return guarded([&] {
    const auto problem = saea::single_objective_problem(problem_1d);
    saea::GenericSaeaConfig config;
    config.budget = budget;
    config.acquisition = saea::parse_acquisition(acquisition);
    config.ucb.kappa = kappa;
    if (literal_variance) config.spread = saea::SpreadMode::kVariance;
    saea::Rng rng(seed);
    const auto result = saea::run_generic_saea(problem.function, problem.bounds, config, rng);
    if (best_x) *best_x = result.incumbent.best_input.front();
    if (best_value) *best_value = result.incumbent.best_value;
  });
}

}  // extern "C"
