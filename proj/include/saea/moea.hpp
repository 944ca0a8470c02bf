#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "saea/rng.hpp"
#include "saea/types.hpp"

namespace saea {

/// Pareto dominance under minimization: u is no worse everywhere and strictly
/// better somewhere.
bool dominates(std::span<const double> u, std::span<const double> v);

/// Deb's fast non-dominated sort. Fronts hold indices into `points` in
/// ascending order; front 0 is the non-dominated subset.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const ObjectiveVector> points);

inline constexpr double kInfiniteCrowding = std::numeric_limits<double>::infinity();

/// Crowding distance of each member of one front. Extremes of every objective
/// get kInfiniteCrowding; an objective with zero range marks every member as
/// an extreme.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> front);

/// Simulated binary crossover. Each variable is recombined with probability
/// 0.5; children are clamped into the box.
std::pair<DecisionVector, DecisionVector> sbx_crossover(const DecisionVector& p1, const DecisionVector& p2,
                                                        const Bounds& bounds, double eta_c, Rng& rng);

/// Bounded polynomial mutation applied to each variable with probability p_m.
DecisionVector polynomial_mutation(DecisionVector x, const Bounds& bounds, double p_m, double eta_m, Rng& rng);

struct Individual {
  DecisionVector genes;
  ObjectiveVector objectives;
  std::size_t rank = 0;
  double crowding = 0.0;
};

struct Population {
  std::vector<Individual> members;
  std::size_t size() const { return members.size(); }
};

/// Evaluates a batch of decision vectors. A non-finite objective marks a
/// solution that could not be evaluated; such solutions lose every comparison.
using BatchObjective = std::function<std::vector<ObjectiveVector>(const std::vector<DecisionVector>&)>;
using GenerationObserver = std::function<void(std::size_t generation, const Population&)>;

/// Wraps a pointwise objective as a BatchObjective.
BatchObjective pointwise(std::function<ObjectiveVector(const DecisionVector&)> f);

struct Nsga2Config {
  std::size_t pop_size = 50;
  std::size_t generations = 50;
  double eta_c = 20.0;
  double eta_m = 20.0;
  double crossover_prob = 0.9;
  /// Per-variable mutation probability; negative means 1/n.
  double mutation_prob = -1.0;
};

/// Binary tournament on (rank, crowding); equal keys are settled by a coin flip.
std::size_t tournament(const Population& pop, Rng& rng);

/// Sorts `pool` into fronts, keeps the best `count` by front then crowding,
/// and assigns rank and crowding to the survivors.
Population environmental_selection(std::vector<Individual> pool, std::size_t count);

/// Generational NSGA-II. `seeds` (at most pop_size of them) replace the first
/// random members of the initial population. generations = 0 returns the
/// evaluated, ranked initial population.
Population nsga2_optimize(const BatchObjective& objective, const Bounds& bounds, const Nsga2Config& config, Rng& rng,
                          std::span<const DecisionVector> seeds = {}, const GenerationObserver& observer = {});

}  // namespace saea
