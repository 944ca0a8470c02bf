#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saea/acquisition.hpp"
#include "saea/gp.hpp"
#include "saea/problems.hpp"
#include "saea/record.hpp"
#include "saea/rng.hpp"

namespace saea {

/// One space-filling design: every axis gets exactly one point in each of
/// `count` equal-width strata, placed uniformly within its stratum.
std::vector<DecisionVector> latin_hypercube(std::size_t n, std::size_t count, const Bounds& bounds, Rng& rng);

struct Sample {
  DecisionVector x;
  ObjectiveVector f;
  std::size_t iteration = 0;
};

/// Archive D of truly evaluated solutions, in evaluation order.
class TrainingSet {
 public:
  const std::vector<Sample>& entries() const { return entries_; }
  std::size_t fe_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Exact match on the decision vector.
  bool contains(std::span<const double> x) const;
  std::vector<ObjectiveVector> objectives() const;
  std::vector<DecisionVector> inputs() const;

 private:
  friend class ExpensiveEvaluator;
  std::vector<Sample> entries_;
};

/// Budget-tracking gateway to the true objectives. Every evaluation lands in
/// the training set; a vector already in the set is answered from it without
/// spending budget.
class ExpensiveEvaluator {
 public:
  ExpensiveEvaluator(const Problem& problem, std::size_t budget, TrainingSet& training)
      : problem_(problem), budget_(budget), training_(training) {}

  /// Throws kBudgetExceeded when no evaluations remain.
  const ObjectiveVector& evaluate(const DecisionVector& x, std::size_t iteration);

  const Problem& problem() const { return problem_; }
  std::size_t budget() const { return budget_; }
  std::size_t used() const { return training_.fe_count(); }
  std::size_t remaining() const { return budget_ > used() ? budget_ - used() : 0; }

 private:
  const Problem& problem_;
  std::size_t budget_;
  TrainingSet& training_;
};

/// Variables each objective responds to, as 0-based indices.
struct CorrelationGroups {
  std::vector<std::vector<std::size_t>> groups;
  double delta = 1e-6;
  std::size_t probe_cost = 0;
  /// True where a group came out empty and was widened to every variable.
  std::vector<bool> repaired;
};

/// One-at-a-time probe from the all-lower-bounds sentinel: variable i joins
/// objective j's group when moving it to its upper bound changes f_j by at
/// least delta. `literal_threshold` inverts the test (change below delta).
/// Costs n + 1 evaluations.
CorrelationGroups correlation_analysis(ExpensiveEvaluator& evaluator, double delta = 1e-6,
                                       bool literal_threshold = false);

/// One surrogate per objective on its correlation group, refit from scratch
/// (hyperparameters warm-started from `previous` when given).
std::vector<Surrogate> build_surrogates(const TrainingSet& training, const CorrelationGroups& groups,
                                        const Bounds& bounds, const HyperSearchConfig& hyper = {},
                                        std::span<const KernelParams> previous = {});

struct TransformedObjectives {
  std::vector<double> values;  // (mean_1, mean_1 - c * spread_1, mean_2, ...)
  double lcb_coeff = 1.0;
  std::size_t dimension() const { return values.size(); }
};

TransformedObjectives transformed_objectives(std::span<const Surrogate> models, std::span<const double> x,
                                             double lcb_coeff, SpreadMode spread);

/// Maps predictions (per solution, per objective) to the 2m search objectives.
std::vector<ObjectiveVector> transform_predictions(const std::vector<std::vector<Prediction>>& per_objective,
                                                   double lcb_coeff, SpreadMode spread);

/// Search output S with predicted means S^o and lower box vertices S^l,
/// index-aligned.
struct CandidateSet {
  std::vector<DecisionVector> solutions;
  std::vector<ObjectiveVector> predicted_means;
  std::vector<ObjectiveVector> lower_vertices;
};

/// l_j = mean_j - box_coeff * spread_j.
CandidateSet make_candidate_set(std::vector<DecisionVector> solutions, std::vector<ObjectiveVector> means,
                                const std::vector<ObjectiveVector>& spreads, double box_coeff = 2.0);

/// Contribution of each point after min-max normalization, with the
/// reference point at the normalized nadir plus 10% of the range (at least 1e-6).
std::vector<double> normalized_contributions(std::span<const ObjectiveVector> points);

struct SelectionResult {
  std::vector<std::size_t> selected;  // candidate indices, highest S^o contribution first
  std::vector<std::size_t> top_means;
  std::vector<std::size_t> top_lower;
  std::vector<double> hvc_means;
  std::vector<double> hvc_lower;
  bool used_fallback = false;
};

/// Top-k indices by contribution, ties to the lower index.
std::vector<std::size_t> top_k(std::span<const double> contributions, std::size_t k);

/// Intersection (or union) of the two top-k sets. An empty intersection falls
/// back to the best S^o candidate plus the best S^l candidate.
SelectionResult combine_top_sets(std::vector<std::size_t> top_means, std::vector<std::size_t> top_lower,
                                 std::span<const double> hvc_means, bool use_union = false);

/// Contribution-based model management over a candidate set.
SelectionResult subset_selection(const CandidateSet& candidates, std::size_t k, bool use_union = false);

struct SaeaConfig {
  std::size_t budget = 300;
  std::size_t n_init = 0;  // 0: min(11n - 1, 40% of budget)
  std::size_t k_select = 10;
  double lcb_coeff = 1.0;
  double box_coeff = 2.0;
  SpreadMode spread = SpreadMode::kVariance;
  bool alg3_literal = false;
  bool alg4_union = false;
  std::size_t inner_pop = 0;  // 0: 50 / 100 / 300 for n <= 10 / 20 / larger
  std::size_t inner_generations = 50;
  double delta = 1e-6;
  /// Seed each inner search with the archive's non-dominated decision vectors.
  bool inject_archive = true;
  HyperSearchConfig hyper;
};

std::size_t default_population(std::size_t n);
std::size_t resolved_n_init(const SaeaConfig& config, std::size_t n);

/// Sets one key ("budget", "n_init", "k_select", "lcb_coeff", "box_coeff",
/// "spread_mode", "alg3_literal", "alg4_union", "inner_pop",
/// "inner_generations", "delta", "inject_archive"). Returns false for keys it
/// does not own; throws kConfigError for bad values.
bool apply_config_value(SaeaConfig& config, std::string_view key, std::string_view value);
ConfigSnapshot snapshot(const SaeaConfig& config);

struct SaeaResult {
  TrainingSet training;
  std::vector<std::size_t> archive;  // indices into training.entries()
  CorrelationGroups groups;
  std::size_t iterations = 0;
  std::vector<std::size_t> batch_sizes;
  bool aborted = false;
  std::string diagnostic;
  RunRecord record;
};

/// The full surrogate-assisted loop until the evaluation budget is spent.
SaeaResult run_saeame(const Problem& problem, const SaeaConfig& config, std::uint64_t seed);

}  // namespace saea
