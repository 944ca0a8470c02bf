#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "saea/gp.hpp"
#include "saea/rng.hpp"
#include "saea/types.hpp"

namespace saea {

/// Which quantity scales the acquisition: the predictive standard deviation
/// (usual practice) or the raw predictive variance (as the formulas are
/// commonly printed).
enum class SpreadMode { kStdDev, kVariance };

/// kMinimization: PI rewards predictions below the incumbent and the
/// confidence bound is mean - kappa * spread. kLiteral: PI uses
/// (mean - best) / spread and the bound is mean + kappa * spread.
enum class Orientation { kMinimization, kLiteral };

double spread_of(const Prediction& pred, SpreadMode mode);

struct Incumbent {
  DecisionVector best_input;
  double best_value = 0.0;
};

struct UcbParams {
  double kappa = 2.0;
};

double normal_cdf(double z);
double normal_pdf(double z);

double probability_of_improvement(const Prediction& pred, const Incumbent& incumbent,
                                  SpreadMode spread = SpreadMode::kStdDev,
                                  Orientation orientation = Orientation::kMinimization);

double expected_improvement(const Prediction& pred, const Incumbent& incumbent,
                            SpreadMode spread = SpreadMode::kStdDev);

double confidence_bound(const Prediction& pred, const UcbParams& params, SpreadMode spread = SpreadMode::kStdDev,
                        Orientation orientation = Orientation::kMinimization);

enum class AcquisitionKind { kPi, kEi, kUcb };
AcquisitionKind parse_acquisition(std::string_view name);

using ScalarObjective = std::function<double(const DecisionVector&)>;

struct SingleObjectiveProblem {
  std::string name;
  Bounds bounds;
  ScalarObjective function;
};

/// Named demo functions: "quadratic" is (x - 0.3)^2 and "forrester" is
/// (6x - 2)^2 sin(12x - 4), both on [0, 1]. Throws kUnsupported otherwise.
SingleObjectiveProblem single_objective_problem(std::string_view name);

struct GenericSaeaConfig {
  std::size_t budget = 30;
  /// 0 selects min(11d - 1, budget / 3), at least 2.
  std::size_t initial_size = 0;
  AcquisitionKind acquisition = AcquisitionKind::kEi;
  UcbParams ucb;
  SpreadMode spread = SpreadMode::kStdDev;
  Orientation orientation = Orientation::kMinimization;
  std::size_t inner_pop = 50;
  std::size_t inner_generations = 50;
  HyperSearchConfig hyper;
};

struct GenericSaeaResult {
  Incumbent incumbent;
  std::vector<std::pair<DecisionVector, double>> log;
  std::size_t model_iterations = 0;
};

/// Single-objective GP-assisted EA: space-filling initial design, then one
/// true evaluation per iteration at the GA maximizer of the acquisition.
/// Returns the best evaluated point.
GenericSaeaResult run_generic_saea(const ScalarObjective& objective, const Bounds& bounds,
                                   const GenericSaeaConfig& config, Rng& rng);

}  // namespace saea
