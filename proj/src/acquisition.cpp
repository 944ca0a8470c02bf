#include "saea/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "saea/error.hpp"
#include "saea/moea.hpp"
#include "saea/saeame.hpp"

namespace saea {

double spread_of(const Prediction& pred, SpreadMode mode) {
  const double var = std::max(pred.variance, 0.0);
  return mode == SpreadMode::kStdDev ? std::sqrt(var) : var;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double probability_of_improvement(const Prediction& pred, const Incumbent& incumbent, SpreadMode spread,
                                  Orientation orientation) {
  const double s = spread_of(pred, spread);
  const double gap = orientation == Orientation::kMinimization ? incumbent.best_value - pred.mean
                                                               : pred.mean - incumbent.best_value;
  if (s <= 0.0) return gap > 0.0 ? 1.0 : 0.0;
  return normal_cdf(gap / s);
}

double expected_improvement(const Prediction& pred, const Incumbent& incumbent, SpreadMode spread) {
  const double s = spread_of(pred, spread);
  const double gap = incumbent.best_value - pred.mean;
  if (s <= 0.0) return std::max(gap, 0.0);
  const double z = gap / s;
  return std::max(gap * normal_cdf(z) + s * normal_pdf(z), 0.0);
}

double confidence_bound(const Prediction& pred, const UcbParams& params, SpreadMode spread, Orientation orientation) {
  const double s = spread_of(pred, spread);
  return orientation == Orientation::kMinimization ? pred.mean - params.kappa * s : pred.mean + params.kappa * s;
}

AcquisitionKind parse_acquisition(std::string_view name) {
  if (name == "pi") return AcquisitionKind::kPi;
  if (name == "ei") return AcquisitionKind::kEi;
  if (name == "ucb") return AcquisitionKind::kUcb;
  raise(ErrorCode::kInvalidArgument, "unknown acquisition '" + std::string(name) + "' (expected pi, ei or ucb)");
}

SingleObjectiveProblem single_objective_problem(std::string_view name) {
  Bounds unit{{0.0}, {1.0}};
  if (name == "quadratic") {
    return {"quadratic", unit, [](const DecisionVector& x) { return (x[0] - 0.3) * (x[0] - 0.3); }};
  }
  if (name == "forrester") {
    return {"forrester", unit, [](const DecisionVector& x) {
              const double a = 6.0 * x[0] - 2.0;
              return a * a * std::sin(12.0 * x[0] - 4.0);
            }};
  }
  raise(ErrorCode::kUnsupported, "unknown single-objective problem '" + std::string(name) + "'");
}

namespace {

// Score to maximize; the confidence bound is minimized, so it is negated.
double acquisition_score(const Prediction& pred, const Incumbent& inc, const GenericSaeaConfig& config) {
  switch (config.acquisition) {
    case AcquisitionKind::kPi:
      return probability_of_improvement(pred, inc, config.spread, config.orientation);
    case AcquisitionKind::kEi:
      return expected_improvement(pred, inc, config.spread);
    case AcquisitionKind::kUcb:
      return -confidence_bound(pred, config.ucb, config.spread, config.orientation);
  }
  return 0.0;
}

struct Scored {
  DecisionVector x;
  double score;
};

// Elitist real-coded GA maximizing `score` over the box.
DecisionVector maximize_with_ga(const std::function<std::vector<double>(const std::vector<DecisionVector>&)>& score,
                                const Bounds& bounds, std::size_t pop_size, std::size_t generations, Rng& rng) {
  const std::size_t n = bounds.size();
  const double p_m = 1.0 / static_cast<double>(n);
  std::vector<DecisionVector> genes(pop_size, DecisionVector(n));
  for (auto& x : genes)
    for (std::size_t j = 0; j < n; ++j) x[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);

  const auto evaluate = [&](std::vector<DecisionVector> xs) {
    const auto s = score(xs);
    std::vector<Scored> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({std::move(xs[i]), std::isfinite(s[i]) ? s[i] : -1e300});
    return out;
  };
  auto pop = evaluate(std::move(genes));
  const auto pick = [&]() -> const DecisionVector& {
    const auto& a = pop[rng.index(pop.size())];
    const auto& b = pop[rng.index(pop.size())];
    return a.score >= b.score ? a.x : b.x;
  };

  for (std::size_t g = 0; g < generations; ++g) {
    std::vector<DecisionVector> children;
    while (children.size() < pop_size) {
      const auto& p1 = pick();
      const auto& p2 = pick();
      auto [c1, c2] = rng.uniform() < 0.9 ? sbx_crossover(p1, p2, bounds, 20.0, rng) : std::pair{p1, p2};
      children.push_back(polynomial_mutation(std::move(c1), bounds, p_m, 20.0, rng));
      children.push_back(polynomial_mutation(std::move(c2), bounds, p_m, 20.0, rng));
    }
    auto offspring = evaluate(std::move(children));
    pop.insert(pop.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    std::stable_sort(pop.begin(), pop.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
    pop.resize(pop_size);
  }
  return pop.front().x;
}

}  // namespace

GenericSaeaResult run_generic_saea(const ScalarObjective& objective, const Bounds& bounds,
                                   const GenericSaeaConfig& config, Rng& rng) {
  const std::size_t d = bounds.size();
  require(d >= 1, "empty decision space");
  require(config.inner_pop >= 2 && config.inner_pop % 2 == 0, "inner population must be even and >= 2");
  std::size_t initial = config.initial_size;
  if (initial == 0) initial = std::max<std::size_t>(2, std::min(11 * d - 1, config.budget / 3));
  require(config.budget >= initial && initial >= 1, "budget must cover the initial design");

  GenericSaeaResult result;
  for (auto& x : latin_hypercube(d, initial, bounds, rng)) {
    const double y = objective(x);
    result.log.emplace_back(std::move(x), y);
  }

  std::optional<KernelParams> previous;
  while (result.log.size() < config.budget) {
    std::vector<DecisionVector> xs;
    std::vector<double> ys;
    for (const auto& [x, y] : result.log) {
      xs.push_back(x);
      ys.push_back(y);
    }
    HyperSearchConfig hyper = config.hyper;
    hyper.warm_start = previous;
    const Surrogate model = Surrogate::fit(xs, ys, {}, bounds, hyper);
    previous = model.model().params();

    Incumbent inc;
    const auto best = std::min_element(ys.begin(), ys.end());
    inc.best_value = *best;
    inc.best_input = xs[static_cast<std::size_t>(best - ys.begin())];

    const auto score = [&](const std::vector<DecisionVector>& cand) {
      const auto preds = model.predict_batch(cand);
      std::vector<double> s(preds.size());
      for (std::size_t i = 0; i < preds.size(); ++i) s[i] = acquisition_score(preds[i], inc, config);
      return s;
    };
    DecisionVector next = maximize_with_ga(score, bounds, config.inner_pop, config.inner_generations, rng);
    const double y = objective(next);
    result.log.emplace_back(std::move(next), y);
    ++result.model_iterations;
  }

  const auto best = std::min_element(result.log.begin(), result.log.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  result.incumbent = {best->first, best->second};
  return result;
}

}  // namespace saea
