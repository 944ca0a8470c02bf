#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "saea/problems.hpp"
#include "saea/record.hpp"
#include "saea/saeame.hpp"

namespace saea {

enum class Algorithm { kSaeame, kNsga2Budget, kRandomSearch };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct DimSettings {
  std::size_t pop_size = 50;
  std::size_t budget = 300;
};

/// A problems x dims x algorithms x repeats matrix. Keys in the flat config
/// file: problems, dims, algorithms (comma lists), repeats, base_seed (alias
/// seed), pf_points, budget (all dims), pop.<n> and budget.<n> (one dim), plus
/// every key accepted by apply_config_value(SaeaConfig&, ...).
struct ExperimentConfig {
  std::vector<ProblemId> problems{ProblemId::kZdt1};
  std::vector<std::size_t> dims{10};
  std::vector<Algorithm> algorithms{Algorithm::kSaeame};
  std::size_t repeats = 11;
  std::uint64_t base_seed = 1;
  std::size_t pf_points = kDefaultFrontSize;
  std::map<std::size_t, DimSettings> per_dim{{10, {50, 300}}, {20, {100, 400}}, {50, {300, 800}}};
  std::size_t budget_override = 0;
  SaeaConfig saea;

  /// Throws kConfigError when n has no settings.
  DimSettings settings_for(std::size_t n) const;
  /// SAEA/ME settings for dimension n: budget and inner population filled in.
  SaeaConfig saea_for(std::size_t n) const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and bad
/// values raise kConfigError naming the key.
ExperimentConfig parse_experiment_config(std::string_view text);
/// Reads a config file; the SAEA_SEED environment variable overrides base_seed.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void apply_experiment_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Uniform sampling of the box; the archive is the non-dominated subset.
RunRecord random_search_baseline(const Problem& problem, std::size_t budget, std::uint64_t seed);

/// Plain NSGA-II on the true objectives with the same evaluation budget.
/// Offspring beyond the budget are never evaluated.
RunRecord nsga2_budget_baseline(const Problem& problem, std::size_t budget, std::size_t pop_size,
                                std::uint64_t seed);

/// One replication including IGD against the fixed reference front and wall time.
RunRecord execute_run(const Problem& problem, Algorithm algorithm, const ExperimentConfig& config,
                      std::uint64_t seed);

std::string record_filename(std::string_view problem, std::size_t n, std::string_view algorithm, std::size_t repeat);

struct ExperimentOutcome {
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::vector<std::filesystem::path> records;
};

/// Runs every missing cell (all cells with `force`) using up to `workers`
/// threads. Seeds are base_seed + repeat index.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                 bool force = false, std::size_t workers = 1);

struct SummaryRow {
  std::string problem;
  std::size_t n = 0;
  std::string algorithm;
  double median_igd = 0.0;
  double std_igd = 0.0;
  std::size_t runs = 0;
  std::string marker;  // "†" reference significantly better, "‡" significantly worse
};

/// Median and sample standard deviation of final IGD per cell, with rank-sum
/// markers against `reference` (suppressed below 5 runs per side).
std::vector<SummaryRow> summarize_records(const std::vector<RunRecord>& records,
                                          std::string_view reference = "saeame");
std::string format_summary(const std::vector<SummaryRow>& rows);
std::vector<RunRecord> load_records(const std::filesystem::path& results_dir);
/// Reads every record under results_dir and writes the summary CSV.
std::vector<SummaryRow> summarize(const std::filesystem::path& results_dir, const std::filesystem::path& out_path);

/// label,f1..fm rows: the run's archive ("archive") followed by the reference
/// front ("pf").
void emit_front_csv(const RunRecord& record, const std::filesystem::path& out_path,
                    std::size_t pf_points = kDefaultFrontSize);

}  // namespace saea
