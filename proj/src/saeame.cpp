#include "saea/saeame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "saea/error.hpp"
#include "saea/metrics.hpp"
#include "saea/moea.hpp"

namespace saea {

std::vector<DecisionVector> latin_hypercube(std::size_t n, std::size_t count, const Bounds& bounds, Rng& rng) {
  require(count >= 1, "Latin hypercube needs at least one point");
  require(bounds.size() == n, "bounds do not match the dimension");
  std::vector<DecisionVector> design(count, DecisionVector(n));
  std::vector<std::size_t> strata(count);
  for (std::size_t dim = 0; dim < n; ++dim) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = count; i > 1; --i) std::swap(strata[i - 1], strata[rng.index(i)]);
    const double width = bounds.upper[dim] - bounds.lower[dim];
    for (std::size_t i = 0; i < count; ++i) {
      const double u = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(count);
      design[i][dim] = bounds.clamp(dim, bounds.lower[dim] + u * width);
    }
  }
  return design;
}

bool TrainingSet::contains(std::span<const double> x) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Sample& s) { return std::equal(s.x.begin(), s.x.end(), x.begin(), x.end()); });
}

std::vector<ObjectiveVector> TrainingSet::objectives() const {
  std::vector<ObjectiveVector> out;
  out.reserve(entries_.size());
  for (const auto& s : entries_) out.push_back(s.f);
  return out;
}

std::vector<DecisionVector> TrainingSet::inputs() const {
  std::vector<DecisionVector> out;
  out.reserve(entries_.size());
  for (const auto& s : entries_) out.push_back(s.x);
  return out;
}

const ObjectiveVector& ExpensiveEvaluator::evaluate(const DecisionVector& x, std::size_t iteration) {
  for (const auto& s : training_.entries_)
    if (s.x == x) return s.f;
  if (remaining() == 0) {
    raise(ErrorCode::kBudgetExceeded, "evaluation budget of " + std::to_string(budget_) + " exhausted");
  }
  ObjectiveVector f = problem_.evaluate(x);
  training_.entries_.push_back({x, std::move(f), iteration});
  return training_.entries_.back().f;
}

CorrelationGroups correlation_analysis(ExpensiveEvaluator& evaluator, double delta, bool literal_threshold) {
  const Problem& problem = evaluator.problem();
  const std::size_t n = problem.num_variables();
  const std::size_t m = problem.num_objectives();
  require(delta > 0.0, "correlation threshold must be positive");
  if (evaluator.remaining() < n + 1) {
    raise(ErrorCode::kBudgetExceeded, "correlation analysis needs " + std::to_string(n + 1) + " evaluations, " +
                                          std::to_string(evaluator.remaining()) + " remain");
  }

  CorrelationGroups out;
  out.delta = delta;
  out.groups.assign(m, {});
  const std::size_t before = evaluator.used();

  const DecisionVector sentinel = problem.bounds().lower;
  const ObjectiveVector base = evaluator.evaluate(sentinel, 0);
  for (std::size_t i = 0; i < n; ++i) {
    DecisionVector probe = sentinel;
    probe[i] = problem.bounds().upper[i];
    const ObjectiveVector& f = evaluator.evaluate(probe, 0);
    for (std::size_t j = 0; j < m; ++j) {
      const double change = std::abs(f[j] - base[j]);
      const bool correlated = literal_threshold ? change < delta : change >= delta;
      if (correlated) out.groups[j].push_back(i);
    }
  }
  out.probe_cost = evaluator.used() - before;

  out.repaired.assign(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    if (!out.groups[j].empty()) continue;
    out.groups[j].resize(n);
    std::iota(out.groups[j].begin(), out.groups[j].end(), std::size_t{0});
    out.repaired[j] = true;
  }
  return out;
}

std::vector<Surrogate> build_surrogates(const TrainingSet& training, const CorrelationGroups& groups,
                                        const Bounds& bounds, const HyperSearchConfig& hyper,
                                        std::span<const KernelParams> previous) {
  require(!training.empty(), "cannot build surrogates from an empty training set");
  const auto xs = training.inputs();
  std::vector<Surrogate> models;
  models.reserve(groups.groups.size());
  for (std::size_t j = 0; j < groups.groups.size(); ++j) {
    std::vector<double> targets;
    targets.reserve(xs.size());
    for (const auto& s : training.entries()) targets.push_back(s.f.at(j));
    HyperSearchConfig cfg = hyper;
    if (j < previous.size()) cfg.warm_start = previous[j];
    try {
      models.push_back(Surrogate::fit(xs, targets, groups.groups[j], bounds, cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericalFailure) throw;
      raise(ErrorCode::kNumericalFailure, "surrogate for objective " + std::to_string(j + 1) + ": " + e.what());
    }
  }
  return models;
}

std::vector<ObjectiveVector> transform_predictions(const std::vector<std::vector<Prediction>>& per_objective,
                                                   double lcb_coeff, SpreadMode spread) {
  const std::size_t m = per_objective.size();
  const std::size_t count = m ? per_objective.front().size() : 0;
  std::vector<ObjectiveVector> out(count, ObjectiveVector(2 * m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < count; ++i) {
      const Prediction& p = per_objective[j][i];
      out[i][2 * j] = p.mean;
      out[i][2 * j + 1] = p.mean - lcb_coeff * spread_of(p, spread);
    }
  }
  return out;
}

TransformedObjectives transformed_objectives(std::span<const Surrogate> models, std::span<const double> x,
                                             double lcb_coeff, SpreadMode spread) {
  std::vector<std::vector<Prediction>> preds;
  for (const auto& model : models) preds.push_back({model.predict(x)});
  TransformedObjectives out;
  out.lcb_coeff = lcb_coeff;
  out.values = transform_predictions(preds, lcb_coeff, spread).front();
  return out;
}

CandidateSet make_candidate_set(std::vector<DecisionVector> solutions, std::vector<ObjectiveVector> means,
                                const std::vector<ObjectiveVector>& spreads, double box_coeff) {
  require(solutions.size() == means.size() && means.size() == spreads.size(),
          "candidate solutions, means and spreads must align");
  CandidateSet set;
  set.lower_vertices.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    require(means[i].size() == spreads[i].size(), "mean and spread vectors differ in length");
    ObjectiveVector l(means[i].size());
    for (std::size_t j = 0; j < l.size(); ++j) l[j] = means[i][j] - box_coeff * spreads[i][j];
    set.lower_vertices.push_back(std::move(l));
  }
  set.solutions = std::move(solutions);
  set.predicted_means = std::move(means);
  return set;
}

std::vector<double> normalized_contributions(std::span<const ObjectiveVector> points) {
  if (points.empty()) return {};
  const std::size_t m = points.front().size();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    for (std::size_t j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  }
  std::vector<ObjectiveVector> scaled(points.size(), ObjectiveVector(m));
  std::vector<double> ref(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double range = hi[j] - lo[j];
    const double unit = range > 0.0 ? range : 1.0;
    for (std::size_t i = 0; i < points.size(); ++i) scaled[i][j] = (points[i][j] - lo[j]) / unit;
    const double nadir = range > 0.0 ? 1.0 : 0.0;
    ref[j] = nadir + std::max(0.1 * nadir, 1e-6);
  }
  return hypervolume_contributions(scaled, ref);
}

std::vector<std::size_t> top_k(std::span<const double> contributions, std::size_t k) {
  std::vector<std::size_t> order(contributions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return contributions[a] > contributions[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

SelectionResult combine_top_sets(std::vector<std::size_t> top_means, std::vector<std::size_t> top_lower,
                                 std::span<const double> hvc_means, bool use_union) {
  SelectionResult result;
  const auto in = [](const std::vector<std::size_t>& v, std::size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  if (use_union) {
    result.selected = top_means;
    for (std::size_t i : top_lower)
      if (!in(result.selected, i)) result.selected.push_back(i);
  } else {
    for (std::size_t i : top_means)
      if (in(top_lower, i)) result.selected.push_back(i);
    if (result.selected.empty()) {
      result.used_fallback = true;
      if (!top_means.empty()) result.selected.push_back(top_means.front());
      if (!top_lower.empty() && !in(result.selected, top_lower.front())) result.selected.push_back(top_lower.front());
    }
  }
  // Evaluation priority follows the S^o contribution.
  if (!hvc_means.empty()) {
    std::stable_sort(result.selected.begin(), result.selected.end(),
                     [&](std::size_t a, std::size_t b) { return hvc_means[a] > hvc_means[b]; });
  }
  result.top_means = std::move(top_means);
  result.top_lower = std::move(top_lower);
  return result;
}

SelectionResult subset_selection(const CandidateSet& candidates, std::size_t k, bool use_union) {
  require(!candidates.solutions.empty(), "subset selection on an empty candidate set");
  require(k >= 1, "subset size k must be at least 1");
  require(candidates.predicted_means.size() == candidates.solutions.size() &&
              candidates.lower_vertices.size() == candidates.solutions.size(),
          "candidate set sequences are misaligned");
  auto hvc_means = normalized_contributions(candidates.predicted_means);
  auto hvc_lower = normalized_contributions(candidates.lower_vertices);
  SelectionResult result = combine_top_sets(top_k(hvc_means, k), top_k(hvc_lower, k), hvc_means, use_union);
  result.hvc_means = std::move(hvc_means);
  result.hvc_lower = std::move(hvc_lower);
  return result;
}

std::size_t default_population(std::size_t n) {
  if (n <= 10) return 50;
  if (n <= 20) return 100;
  return 300;
}

std::size_t resolved_n_init(const SaeaConfig& config, std::size_t n) {
  if (config.n_init > 0) return config.n_init;
  const std::size_t cap = config.budget * 2 / 5;
  return std::max<std::size_t>(1, std::min(11 * n - 1, cap));
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  raise(ErrorCode::kConfigError, "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

std::size_t to_size(std::string_view key, std::string_view value) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

double to_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value);
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

bool near_duplicate(const DecisionVector& a, const DecisionVector& b, const Bounds& bounds) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-10 * (bounds.upper[i] - bounds.lower[i])) return false;
  return true;
}

}  // namespace

bool apply_config_value(SaeaConfig& c, std::string_view key, std::string_view value) {
  if (key == "budget") {
    c.budget = to_size(key, value);
  } else if (key == "n_init") {
    c.n_init = to_size(key, value);
  } else if (key == "k_select") {
    c.k_select = to_size(key, value);
    if (c.k_select == 0) bad_value(key, value);
  } else if (key == "lcb_coeff") {
    c.lcb_coeff = to_double(key, value);
    if (c.lcb_coeff < 0.0) bad_value(key, value);
  } else if (key == "box_coeff") {
    c.box_coeff = to_double(key, value);
    if (c.box_coeff < 0.0) bad_value(key, value);
  } else if (key == "spread_mode") {
    if (value == "variance") {
      c.spread = SpreadMode::kVariance;
    } else if (value == "stddev") {
      c.spread = SpreadMode::kStdDev;
    } else {
      bad_value(key, value);
    }
  } else if (key == "alg3_literal") {
    c.alg3_literal = to_bool(key, value);
  } else if (key == "alg4_union") {
    c.alg4_union = to_bool(key, value);
  } else if (key == "inner_pop") {
    c.inner_pop = to_size(key, value);
    if (c.inner_pop % 2 != 0) bad_value(key, value);
  } else if (key == "inner_generations") {
    c.inner_generations = to_size(key, value);
  } else if (key == "delta") {
    c.delta = to_double(key, value);
    if (!(c.delta > 0.0)) bad_value(key, value);
  } else if (key == "inject_archive") {
    c.inject_archive = to_bool(key, value);
  } else {
    return false;
  }
  return true;
}

ConfigSnapshot snapshot(const SaeaConfig& c) {
  return {
      {"budget", std::to_string(c.budget)},
      {"n_init", std::to_string(c.n_init)},
      {"k_select", std::to_string(c.k_select)},
      {"lcb_coeff", format_number(c.lcb_coeff)},
      {"box_coeff", format_number(c.box_coeff)},
      {"spread_mode", c.spread == SpreadMode::kVariance ? "variance" : "stddev"},
      {"alg3_literal", bool_text(c.alg3_literal)},
      {"alg4_union", bool_text(c.alg4_union)},
      {"inner_pop", std::to_string(c.inner_pop)},
      {"inner_generations", std::to_string(c.inner_generations)},
      {"delta", format_number(c.delta)},
      {"inject_archive", bool_text(c.inject_archive)},
  };
}

SaeaResult run_saeame(const Problem& problem, const SaeaConfig& config, std::uint64_t seed) {
  const std::size_t n = problem.num_variables();
  const std::size_t m = problem.num_objectives();
  const Bounds& bounds = problem.bounds();
  const std::size_t n_init = resolved_n_init(config, n);
  require(config.budget >= n_init + n + 1,
          "budget " + std::to_string(config.budget) + " cannot cover " + std::to_string(n_init) +
              " initial points plus " + std::to_string(n + 1) + " probes");
  require(config.k_select >= 1, "k_select must be at least 1");
  const std::size_t pop_size = config.inner_pop > 0 ? config.inner_pop : default_population(n);

  Rng rng(seed);
  SaeaResult result;
  ExpensiveEvaluator evaluator(problem, config.budget, result.training);

  for (const auto& x : latin_hypercube(n, n_init, bounds, rng)) evaluator.evaluate(x, 0);
  result.groups = correlation_analysis(evaluator, config.delta, config.alg3_literal);

  std::vector<KernelParams> previous;
  while (evaluator.remaining() > 0) {
    const std::size_t iteration = ++result.iterations;
    std::vector<Surrogate> models;
    try {
      models = build_surrogates(result.training, result.groups, bounds, config.hyper, previous);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericalFailure) throw;
      result.aborted = true;
      result.diagnostic = "iteration " + std::to_string(iteration) + ": " + e.what();
      break;
    }
    previous.clear();
    for (const auto& model : models) previous.push_back(model.model().params());

    const auto predict_all = [&](const std::vector<DecisionVector>& xs) {
      std::vector<std::vector<Prediction>> per_objective;
      per_objective.reserve(models.size());
      for (const auto& model : models) per_objective.push_back(model.predict_batch(xs));
      return per_objective;
    };
    const BatchObjective search_objective = [&](const std::vector<DecisionVector>& xs) {
      return transform_predictions(predict_all(xs), config.lcb_coeff, config.spread);
    };

    std::vector<DecisionVector> seeds;
    if (config.inject_archive) {
      const auto objs = result.training.objectives();
      for (std::size_t idx : nondominated_indices(objs)) seeds.push_back(result.training.entries()[idx].x);
    }
    Rng search_rng = rng.split();
    const Population pop =
        nsga2_optimize(search_objective, bounds, Nsga2Config{pop_size, config.inner_generations}, search_rng, seeds);

    std::vector<DecisionVector> solutions;
    for (const auto& ind : pop.members) {
      const bool seen = std::any_of(solutions.begin(), solutions.end(),
                                    [&](const auto& s) { return near_duplicate(s, ind.genes, bounds); }) ||
                        std::any_of(result.training.entries().begin(), result.training.entries().end(),
                                    [&](const Sample& s) { return near_duplicate(s.x, ind.genes, bounds); });
      if (!seen) solutions.push_back(ind.genes);
    }

    std::vector<DecisionVector> chosen;
    if (solutions.empty()) {
      // Search collapsed onto the archive; spend one evaluation on a fresh point.
      DecisionVector x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
      chosen.push_back(std::move(x));
    } else {
      const auto per_objective = predict_all(solutions);
      std::vector<ObjectiveVector> means(solutions.size(), ObjectiveVector(m));
      std::vector<ObjectiveVector> spreads(solutions.size(), ObjectiveVector(m));
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < solutions.size(); ++i) {
          means[i][j] = per_objective[j][i].mean;
          spreads[i][j] = spread_of(per_objective[j][i], config.spread);
        }
      }
      const CandidateSet candidates =
          make_candidate_set(std::move(solutions), std::move(means), spreads, config.box_coeff);
      const SelectionResult selection = subset_selection(candidates, config.k_select, config.alg4_union);
      for (std::size_t idx : selection.selected) chosen.push_back(candidates.solutions[idx]);
    }

    if (chosen.size() > evaluator.remaining()) chosen.resize(evaluator.remaining());
    result.batch_sizes.push_back(chosen.size());
    for (const auto& x : chosen) evaluator.evaluate(x, iteration);
  }

  result.archive = nondominated_indices(result.training.objectives());

  RunRecord& record = result.record;
  record.problem = std::string(problem.name());
  record.n = n;
  record.m = m;
  record.algorithm = "saeame";
  record.seed = seed;
  SaeaConfig resolved = config;
  resolved.n_init = n_init;
  resolved.inner_pop = pop_size;
  record.config = snapshot(resolved);
  for (std::size_t i = 0; i < result.training.entries().size(); ++i) {
    const auto& s = result.training.entries()[i];
    record.log.push_back({s.iteration, i, s.x, s.f});
  }
  record.archive = result.archive;
  if (result.aborted) {
    record.status = "aborted";
    record.diagnostic = result.diagnostic;
  }
  return result;
}

}  // namespace saea
