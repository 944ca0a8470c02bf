#include "saea/moea.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "saea/error.hpp"

namespace saea {

bool dominates(std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), "dominance check on vectors of different length");
  bool strictly = false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > v[i]) return false;
    if (u[i] < v[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const ObjectiveVector> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  if (n == 0) return fronts;

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(points[p], points[q])) {
        dominated_by_me[p].push_back(q);
        ++domination_count[q];
      } else if (dominates(points[q], points[p])) {
        dominated_by_me[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p)
    if (domination_count[p] == 0) current.push_back(p);

  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      for (std::size_t q : dominated_by_me[p])
        if (--domination_count[q] == 0) next.push_back(q);
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n == 0) return distance;
  if (n <= 2) return std::vector<double>(n, kInfiniteCrowding);

  const std::size_t m = front.front().size();
  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
    const double lo = front[order.front()][obj];
    const double hi = front[order.back()][obj];
    const double range = hi - lo;
    if (!(range > 0.0) || !std::isfinite(range)) {
      std::fill(distance.begin(), distance.end(), kInfiniteCrowding);
      continue;
    }
    distance[order.front()] = kInfiniteCrowding;
    distance[order.back()] = kInfiniteCrowding;
    for (std::size_t i = 1; i + 1 < n; ++i)
      distance[order[i]] += (front[order[i + 1]][obj] - front[order[i - 1]][obj]) / range;
  }
  return distance;
}

std::pair<DecisionVector, DecisionVector> sbx_crossover(const DecisionVector& p1, const DecisionVector& p2,
                                                        const Bounds& bounds, double eta_c, Rng& rng) {
  require(p1.size() == p2.size() && p1.size() == bounds.size(), "crossover parents do not match the bounds");
  DecisionVector c1 = p1, c2 = p2;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (rng.uniform() > 0.5) continue;
    if (std::abs(p1[i] - p2[i]) <= 1e-14) continue;
    const double u = rng.uniform();
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta_c + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta_c + 1.0));
    double a = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
    double b = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
    if (rng.coin()) std::swap(a, b);
    c1[i] = bounds.clamp(i, a);
    c2[i] = bounds.clamp(i, b);
  }
  return {std::move(c1), std::move(c2)};
}

DecisionVector polynomial_mutation(DecisionVector x, const Bounds& bounds, double p_m, double eta_m, Rng& rng) {
  require(x.size() == bounds.size(), "mutation input does not match the bounds");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(rng.uniform() < p_m)) continue;
    const double lo = bounds.lower[i], hi = bounds.upper[i];
    const double width = hi - lo;
    const double d1 = (x[i] - lo) / width;
    const double d2 = (hi - x[i]) / width;
    const double u = rng.uniform();
    const double power = 1.0 / (eta_m + 1.0);
    double dq = 0.0;
    if (u < 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta_m + 1.0);
      dq = std::pow(val, power) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
      dq = 1.0 - std::pow(val, power);
    }
    x[i] = bounds.clamp(i, x[i] + dq * width);
  }
  return x;
}

BatchObjective pointwise(std::function<ObjectiveVector(const DecisionVector&)> f) {
  return [f = std::move(f)](const std::vector<DecisionVector>& xs) {
    std::vector<ObjectiveVector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(f(x));
    return out;
  };
}

std::size_t tournament(const Population& pop, Rng& rng) {
  const std::size_t a = rng.index(pop.size());
  const std::size_t b = rng.index(pop.size());
  const auto& ia = pop.members[a];
  const auto& ib = pop.members[b];
  if (ia.rank != ib.rank) return ia.rank < ib.rank ? a : b;
  if (ia.crowding != ib.crowding) return ia.crowding > ib.crowding ? a : b;
  return rng.coin() ? a : b;
}

namespace {

std::vector<ObjectiveVector> objectives_of(const std::vector<Individual>& members, std::span<const std::size_t> idx) {
  std::vector<ObjectiveVector> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(members[i].objectives);
  return out;
}

}  // namespace

Population environmental_selection(std::vector<Individual> pool, std::size_t count) {
  std::vector<ObjectiveVector> objs;
  objs.reserve(pool.size());
  for (const auto& ind : pool) objs.push_back(ind.objectives);
  const auto fronts = fast_nondominated_sort(objs);

  Population next;
  next.members.reserve(std::min(count, pool.size()));
  for (std::size_t rank = 0; rank < fronts.size() && next.size() < count; ++rank) {
    const auto& front = fronts[rank];
    const auto crowd = crowding_distance(objectives_of(pool, front));
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (next.size() + front.size() > count) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      order.resize(count - next.size());
      std::sort(order.begin(), order.end());
    }
    std::vector<std::size_t> kept;
    for (std::size_t o : order) kept.push_back(front[o]);
    const auto kept_crowd = crowding_distance(objectives_of(pool, kept));
    for (std::size_t i = 0; i < kept.size(); ++i) {
      Individual ind = std::move(pool[kept[i]]);
      ind.rank = rank;
      ind.crowding = kept_crowd[i];
      next.members.push_back(std::move(ind));
    }
  }
  return next;
}

Population nsga2_optimize(const BatchObjective& objective, const Bounds& bounds, const Nsga2Config& config, Rng& rng,
                          std::span<const DecisionVector> seeds, const GenerationObserver& observer) {
  require(config.pop_size >= 2 && config.pop_size % 2 == 0, "NSGA-II population size must be even and >= 2");
  const std::size_t n = bounds.size();
  require(n >= 1, "empty decision space");
  const double p_m = config.mutation_prob < 0.0 ? 1.0 / static_cast<double>(n) : config.mutation_prob;

  const auto evaluate = [&](std::vector<DecisionVector> genes) {
    auto values = objective(genes);
    require(values.size() == genes.size(), "objective returned the wrong number of results");
    std::vector<Individual> out(genes.size());
    for (std::size_t i = 0; i < genes.size(); ++i) {
      out[i].genes = std::move(genes[i]);
      out[i].objectives = std::move(values[i]);
      for (double& v : out[i].objectives)
        if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    }
    return out;
  };

  std::vector<DecisionVector> init;
  init.reserve(config.pop_size);
  for (std::size_t i = 0; i < seeds.size() && init.size() < config.pop_size; ++i) {
    require(seeds[i].size() == n, "seed vector does not match the decision space");
    DecisionVector x = seeds[i];
    for (std::size_t j = 0; j < n; ++j) x[j] = bounds.clamp(j, x[j]);
    init.push_back(std::move(x));
  }
  while (init.size() < config.pop_size) {
    DecisionVector x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);
    init.push_back(std::move(x));
  }
  Population pop = environmental_selection(evaluate(std::move(init)), config.pop_size);
  if (observer) observer(0, pop);

  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    std::vector<DecisionVector> children;
    children.reserve(config.pop_size);
    while (children.size() < config.pop_size) {
      const auto& p1 = pop.members[tournament(pop, rng)].genes;
      const auto& p2 = pop.members[tournament(pop, rng)].genes;
      auto [c1, c2] = rng.uniform() < config.crossover_prob ? sbx_crossover(p1, p2, bounds, config.eta_c, rng)
                                                            : std::pair{p1, p2};
      children.push_back(polynomial_mutation(std::move(c1), bounds, p_m, config.eta_m, rng));
      children.push_back(polynomial_mutation(std::move(c2), bounds, p_m, config.eta_m, rng));
    }
    auto pool = std::move(pop.members);
    auto offspring = evaluate(std::move(children));
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    pop = environmental_selection(std::move(pool), config.pop_size);
    if (observer) observer(gen, pop);
  }
  return pop;
}

}  // namespace saea
