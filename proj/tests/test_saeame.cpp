#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "saea/error.hpp"
#include "saea/metrics.hpp"
#include "saea/moea.hpp"
#include "saea/saeame.hpp"
#include "support.hpp"

using namespace saea;

namespace {

// Exclusive areas of a mutually non-dominated 2-D set: each point owns the
// rectangle between its neighbours on the staircase.
std::vector<double> staircase_contributions(const std::vector<ObjectiveVector>& pts, const ObjectiveVector& ref) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });
  std::vector<double> out(pts.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& p = pts[order[r]];
    const double right = r + 1 < order.size() ? pts[order[r + 1]][0] : ref[0];
    const double top = r > 0 ? pts[order[r - 1]][1] : ref[1];
    out[order[r]] = (right - p[0]) * (top - p[1]);
  }
  return out;
}

// Min-max scaling with the reference at 1.1 on every axis.
std::vector<ObjectiveVector> normalize(const std::vector<ObjectiveVector>& pts) {
  auto out = pts;
  for (std::size_t j = 0; j < pts.front().size(); ++j) {
    double lo = pts[0][j], hi = pts[0][j];
    for (const auto& p : pts) {
      lo = std::min(lo, p[j]);
      hi = std::max(hi, p[j]);
    }
    for (auto& p : out) p[j] = (p[j] - lo) / (hi - lo);
  }
  return out;
}

std::set<std::size_t> top3(const std::vector<double>& v) {
  std::vector<std::size_t> idx{0, 1, 2, 3, 4};
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return {idx[0], idx[1], idx[2]};
}

// Five candidates whose S^o and S^l rankings reproduce the textbook case:
// top-3 by S^o is {x2, x3, x4} and by S^l is {x1, x3, x4} (1-based).
CandidateSet worked_example() {
  std::vector<DecisionVector> xs{{0.1}, {0.2}, {0.3}, {0.4}, {0.5}};
  std::vector<ObjectiveVector> means{{0, 10}, {1, 6}, {3, 3}, {6, 1}, {10, 0}};
  // Lower vertices (-4,6), (0.5,5.8), (2,1), (5,-1), (9.8,-1.2) with box coefficient 2.
  std::vector<ObjectiveVector> spreads{{2, 2}, {0.25, 0.1}, {0.5, 1}, {0.5, 1}, {0.1, 0.6}};
  return make_candidate_set(std::move(xs), std::move(means), spreads, 2.0);
}

Bounds unit_box(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)}; }

}  // namespace

TEST_CASE("Latin hypercube strata") {
  Rng rng(1);
  const auto one = latin_hypercube(3, 1, unit_box(3), rng);
  REQUIRE(one.size() == 1);
  CHECK(unit_box(3).contains(one[0]));

  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.index(6), count = 1 + rng.index(40);
    Bounds b{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      b.lower[i] = rng.uniform(-5, 0);
      b.upper[i] = b.lower[i] + rng.uniform(0.5, 5);
    }
    const auto design = latin_hypercube(n, count, b, rng);
    REQUIRE(design.size() == count);
    for (std::size_t dim = 0; dim < n; ++dim) {
      std::vector<int> hits(count, 0);
      for (const auto& x : design) {
        const double u = (x[dim] - b.lower[dim]) / (b.upper[dim] - b.lower[dim]);
        ++hits[std::min<std::size_t>(static_cast<std::size_t>(u * static_cast<double>(count)), count - 1)];
      }
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }

  Rng a(5), c(5);
  CHECK(latin_hypercube(2, 4, unit_box(2), a) == latin_hypercube(2, 4, unit_box(2), c));
}

TEST_CASE("evaluator charges each new vector once") {
  const Problem zdt1(ProblemId::kZdt1, 3);
  TrainingSet training;
  ExpensiveEvaluator eval(zdt1, 2, training);
  const DecisionVector x{0.2, 0.3, 0.4};
  CHECK(eval.evaluate(x, 0) == zdt1.evaluate(x));
  CHECK(eval.evaluate(x, 1) == zdt1.evaluate(x));
  CHECK(eval.used() == 1);
  eval.evaluate({0.5, 0.5, 0.5}, 1);
  CHECK(eval.remaining() == 0);
  CHECK(training.contains(std::vector<double>{0.5, 0.5, 0.5}));
  try {
    eval.evaluate({0.6, 0.5, 0.5}, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
  CHECK(training.fe_count() == 2);
}

TEST_CASE("correlation analysis on ZDT1") {
  for (std::size_t n : {3, 10, 30}) {
    const Problem zdt1(ProblemId::kZdt1, n);
    TrainingSet training;
    ExpensiveEvaluator eval(zdt1, 100, training);
    const auto g = correlation_analysis(eval);
    REQUIRE(g.groups.size() == 2);
    CHECK(g.groups[0] == std::vector<std::size_t>{0});
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    CHECK(g.groups[1] == all);
    CHECK(g.probe_cost == n + 1);
    CHECK(training.fe_count() == n + 1);
    CHECK(g.repaired == std::vector<bool>{false, false});
  }
  // f2 at the sentinel is 1; raising x2 gives g = 1 + 9/2 and f2 = 5.5.
  const Problem zdt1(ProblemId::kZdt1, 3);
  TrainingSet training;
  ExpensiveEvaluator eval(zdt1, 4, training);
  correlation_analysis(eval);
  CHECK(training.entries()[0].f[1] == doctest::Approx(1.0));
  CHECK(training.entries()[2].f[1] - training.entries()[0].f[1] == doctest::Approx(4.5));
}

TEST_CASE("correlation analysis repairs empty groups") {
  const Problem zdt1(ProblemId::kZdt1, 4);
  {
    TrainingSet training;
    ExpensiveEvaluator eval(zdt1, 5, training);
    const auto g = correlation_analysis(eval, 1e6);
    CHECK(g.repaired == std::vector<bool>{true, true});
    CHECK(g.groups[0] == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(g.groups[1] == std::vector<std::size_t>{0, 1, 2, 3});
  }
  {
    // Inverted test: f1 "depends" on everything but x1, f2 on nothing.
    TrainingSet training;
    ExpensiveEvaluator eval(zdt1, 5, training);
    const auto g = correlation_analysis(eval, 1e-6, true);
    CHECK(g.groups[0] == std::vector<std::size_t>{1, 2, 3});
    CHECK(g.repaired == std::vector<bool>{false, true});
  }
  {
    TrainingSet training;
    ExpensiveEvaluator eval(zdt1, 4, training);
    try {
      correlation_analysis(eval);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBudgetExceeded);
    }
  }
}

TEST_CASE("correlation analysis cannot see DTLZ2 distance variables") {
  // (x - 0.5)^2 is the same at both bounds, so the one-at-a-time probe from
  // the lower corner leaves g unchanged.
  const Problem dtlz2(ProblemId::kDtlz2, 6);
  TrainingSet training;
  ExpensiveEvaluator eval(dtlz2, 7, training);
  const auto g = correlation_analysis(eval);
  CHECK(g.groups[0] == std::vector<std::size_t>{0, 1});
  CHECK(g.groups[1] == std::vector<std::size_t>{1});
  CHECK(g.groups[2] == std::vector<std::size_t>{0});
}

TEST_CASE("surrogates are built on the correlation groups") {
  const Problem zdt1(ProblemId::kZdt1, 5);
  TrainingSet training;
  ExpensiveEvaluator eval(zdt1, 40, training);
  Rng rng(3);
  for (const auto& x : latin_hypercube(5, 20, zdt1.bounds(), rng)) eval.evaluate(x, 0);
  const auto groups = correlation_analysis(eval);
  const auto models = build_surrogates(training, groups, zdt1.bounds());
  REQUIRE(models.size() == 2);
  CHECK(models[0].features() == std::vector<std::size_t>{0});
  CHECK(models[0].model().dim() == 1);
  CHECK(models[1].model().dim() == 5);
  CHECK(models[0].model().params().length_scale != models[1].model().params().length_scale);
  for (std::size_t j = 0; j < 2; ++j) {
    // Inside the model the training residual is exactly the jitter term.
    const GpModel& gp = models[j].model();
    Eigen::VectorXd mean, var;
    gp.predict_batch(gp.train_inputs(), mean, var);
    const Eigen::VectorXd expected = gp.train_targets() - gp.jitter() * gp.alpha();
    CHECK((mean - expected).cwiseAbs().maxCoeff() <= 1e-9);
    // In original units that stays far below the target spread (duplicate probe
    // inputs make the 1-D model for f1 the worst conditioned).
    double worst = 0.0, lo = 1e300, hi = -1e300;
    for (const auto& s : training.entries()) {
      worst = std::max(worst, std::abs(models[j].predict(s.x).mean - s.f[j]));
      lo = std::min(lo, s.f[j]);
      hi = std::max(hi, s.f[j]);
    }
    CHECK(worst <= 1e-5 * (hi - lo));
  }
  CHECK_THROWS_AS(build_surrogates(TrainingSet{}, groups, zdt1.bounds()), Error);
}

TEST_CASE("transformed objectives") {
  using Preds = std::vector<std::vector<Prediction>>;
  CHECK(transform_predictions(Preds{{{0.5, 0.04}}}, 1.0, SpreadMode::kVariance).front() ==
        ObjectiveVector{0.5, 0.5 - 0.04});
  CHECK(transform_predictions(Preds{{{0.5, 0.04}}}, 1.0, SpreadMode::kStdDev).front()[1] == doctest::Approx(0.3));
  CHECK(transform_predictions(Preds{{{0.5, 0.0}}}, 3.0, SpreadMode::kStdDev).front() == ObjectiveVector{0.5, 0.5});
  const auto two = transform_predictions(Preds{{{1.0, 0.25}}, {{2.0, 0.09}}}, 2.0, SpreadMode::kStdDev).front();
  REQUIRE(two.size() == 4);
  CHECK(two[0] == 1.0);
  CHECK(two[1] == doctest::Approx(0.0));
  CHECK(two[2] == 2.0);
  CHECK(two[3] == doctest::Approx(1.4));

  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 1 + rng.index(3);
    Preds preds(m, std::vector<Prediction>(1));
    for (auto& p : preds) p[0] = {rng.uniform(-5, 5), rng.uniform(0, 4)};
    const auto mode = rng.coin() ? SpreadMode::kVariance : SpreadMode::kStdDev;
    const auto h = transform_predictions(preds, rng.uniform(0, 3), mode).front();
    for (std::size_t i = 0; i < m; ++i) CHECK(h[2 * i + 1] <= h[2 * i]);
  }

  // Through real models: values line up with each model's prediction.
  const Problem zdt1(ProblemId::kZdt1, 3);
  TrainingSet training;
  ExpensiveEvaluator eval(zdt1, 20, training);
  for (const auto& x : latin_hypercube(3, 12, zdt1.bounds(), rng)) eval.evaluate(x, 0);
  const auto models = build_surrogates(training, correlation_analysis(eval), zdt1.bounds());
  const std::vector<double> x{0.3, 0.6, 0.1};
  const auto h = transformed_objectives(models, x, 1.0, SpreadMode::kVariance);
  CHECK(h.dimension() == 4);
  const auto p0 = models[0].predict(x), p1 = models[1].predict(x);
  CHECK(h.values == ObjectiveVector{p0.mean, p0.mean - p0.variance, p1.mean, p1.mean - p1.variance});
}

TEST_CASE("candidate set keeps the three sequences aligned") {
  const auto c = worked_example();
  REQUIRE(c.lower_vertices.size() == 5);
  CHECK(c.lower_vertices[0] == ObjectiveVector{-4, 6});
  CHECK(c.lower_vertices[3] == ObjectiveVector{5, -1});
  CHECK(c.solutions[2] == DecisionVector{0.3});
  CHECK_THROWS_AS(make_candidate_set({{0.1}}, {{1, 1}, {2, 2}}, {{0, 0}, {0, 0}}), Error);
}

TEST_CASE("worked subset-selection example") {
  const auto c = worked_example();
  // Independent check of the rankings the construction is meant to produce.
  const ObjectiveVector ref{1.1, 1.1};
  const auto hvc_o = staircase_contributions(normalize(c.predicted_means), ref);
  const auto hvc_l = staircase_contributions(normalize(c.lower_vertices), ref);
  REQUIRE(top3(hvc_o) == std::set<std::size_t>{1, 2, 3});
  REQUIRE(top3(hvc_l) == std::set<std::size_t>{0, 2, 3});

  const auto r = subset_selection(c, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r.hvc_means[i] == doctest::Approx(hvc_o[i]));
    CHECK(r.hvc_lower[i] == doctest::Approx(hvc_l[i]));
  }
  CHECK(r.selected == std::vector<std::size_t>{2, 3});
  CHECK_FALSE(r.used_fallback);

  const auto u = subset_selection(c, 3, true);
  CHECK(std::set<std::size_t>(u.selected.begin(), u.selected.end()) == std::set<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("subset selection edge cases") {
  const auto c = worked_example();
  const auto all = subset_selection(c, 10);
  CHECK(std::set<std::size_t>(all.selected.begin(), all.selected.end()) == std::set<std::size_t>{0, 1, 2, 3, 4});

  // Zero spreads: S^l = S^o and the selection is the S^o top-k.
  const auto flat = make_candidate_set(c.solutions, c.predicted_means, std::vector<ObjectiveVector>(5, {0, 0}));
  CHECK(flat.lower_vertices == flat.predicted_means);
  const auto r = subset_selection(flat, 3);
  CHECK(r.selected == top_k(r.hvc_means, 3));

  const auto single = subset_selection(make_candidate_set({{0.5}}, {{1, 2}}, {{0.1, 0.1}}), 3);
  CHECK(single.selected == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(subset_selection(CandidateSet{}, 3), Error);
  CHECK_THROWS_AS(subset_selection(c, 0), Error);

  // Disjoint top sets fall back to the best of each.
  const auto fb = combine_top_sets({1}, {4}, std::vector<double>{0, 5, 0, 0, 1});
  CHECK(fb.used_fallback);
  CHECK(fb.selected == std::vector<std::size_t>{1, 4});
}

TEST_CASE("ties in top-k go to the lower index") {
  CHECK(top_k(std::vector<double>{1, 3, 3, 2}, 2) == std::vector<std::size_t>{1, 2});
  CHECK(top_k(std::vector<double>{1, 1, 1}, 5) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("selection size stays within bounds") {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const std::size_t count = 1 + rng.index(30), m = 2 + rng.index(2), k = 1 + rng.index(8);
    std::vector<DecisionVector> xs(count, DecisionVector(1));
    for (std::size_t i = 0; i < count; ++i) xs[i][0] = static_cast<double>(i);
    const auto means = testing::random_points(rng, count, m);
    const auto spreads = testing::random_points(rng, count, m, 0.0, 0.2);
    const bool use_union = rng.coin();
    const auto r = subset_selection(make_candidate_set(xs, means, spreads), k, use_union);
    CHECK(r.selected.size() >= 1);
    CHECK(r.selected.size() <= std::min(2 * k, count));
    if (!use_union) CHECK(r.selected.size() <= std::max<std::size_t>(k, 2));
    const std::set<std::size_t> unique(r.selected.begin(), r.selected.end());
    CHECK(unique.size() == r.selected.size());
    for (std::size_t i : r.selected) CHECK(i < count);
  }
}

TEST_CASE("normalized contributions use a reference beyond the nadir") {
  const std::vector<ObjectiveVector> stairs{{0, 10}, {1, 6}, {3, 3}, {6, 1}, {10, 0}};
  const auto hvc = normalized_contributions(stairs);
  CHECK(hvc[0] == doctest::Approx(0.01));
  CHECK(hvc[1] == doctest::Approx(0.08));
  CHECK(hvc[2] == doctest::Approx(0.09));
  CHECK(hvc[3] == doctest::Approx(0.08));
  CHECK(hvc[4] == doctest::Approx(0.01));
  // A constant objective still leaves every point a positive share.
  const auto flat = normalized_contributions(std::vector<ObjectiveVector>{{0, 5}, {1, 5}});
  CHECK(flat[0] > 0.0);
}

TEST_CASE("config keys") {
  SaeaConfig c;
  CHECK(apply_config_value(c, "budget", "120"));
  CHECK(apply_config_value(c, "k_select", "4"));
  CHECK(apply_config_value(c, "lcb_coeff", "1.5"));
  CHECK(apply_config_value(c, "spread_mode", "stddev"));
  CHECK(apply_config_value(c, "alg3_literal", "true"));
  CHECK(apply_config_value(c, "alg4_union", "yes"));
  CHECK(apply_config_value(c, "inner_pop", "20"));
  CHECK(apply_config_value(c, "delta", "1e-4"));
  CHECK(c.budget == 120);
  CHECK(c.k_select == 4);
  CHECK(c.lcb_coeff == 1.5);
  CHECK(c.spread == SpreadMode::kStdDev);
  CHECK(c.alg3_literal);
  CHECK(c.alg4_union);
  CHECK(c.inner_pop == 20);
  CHECK(c.delta == 1e-4);
  CHECK_FALSE(apply_config_value(c, "colour", "blue"));
  for (auto [key, value] : std::vector<std::pair<const char*, const char*>>{{"budget", "-3"},
                                                                           {"budget", "12x"},
                                                                           {"k_select", "0"},
                                                                           {"spread_mode", "sd"},
                                                                           {"alg4_union", "maybe"},
                                                                           {"inner_pop", "15"},
                                                                           {"delta", "0"},
                                                                           {"lcb_coeff", "nan"}}) {
    try {
      apply_config_value(c, key, value);
      FAIL("expected an error for " << key);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfigError);
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  }
  const auto snap = snapshot(SaeaConfig{});
  SaeaConfig back;
  back.budget = 1;
  for (const auto& [k, v] : snap) CHECK(apply_config_value(back, k, v));
  CHECK(snapshot(back) == snap);
}

TEST_CASE("initial design size and inner population defaults") {
  SaeaConfig c;
  c.budget = 300;
  CHECK(resolved_n_init(c, 10) == 109);
  CHECK(resolved_n_init(c, 20) == 120);
  c.n_init = 7;
  CHECK(resolved_n_init(c, 20) == 7);
  CHECK(default_population(10) == 50);
  CHECK(default_population(20) == 100);
  CHECK(default_population(50) == 300);
}

TEST_CASE("budget covering only the design and probes runs no iterations") {
  const Problem zdt1(ProblemId::kZdt1, 4);
  SaeaConfig c;
  c.n_init = 9;
  c.budget = 9 + 4 + 1;
  const auto r = run_saeame(zdt1, c, 3);
  CHECK(r.iterations == 0);
  CHECK(r.training.fe_count() == 14);
  CHECK(r.archive == nondominated_indices(r.training.objectives()));
  c.budget = 13;
  CHECK_THROWS_AS(run_saeame(zdt1, c, 3), Error);
}

TEST_CASE("a short run keeps exact accounting") {
  const Problem zdt1(ProblemId::kZdt1, 4);
  SaeaConfig c;
  c.n_init = 10;
  c.budget = 40;
  c.k_select = 4;
  c.inner_pop = 20;
  c.inner_generations = 10;
  const auto r = run_saeame(zdt1, c, 11);
  const auto& log = r.record.log;
  REQUIRE(log.size() == 40);
  CHECK(r.training.fe_count() == 40);
  std::size_t model_fes = 0;
  for (std::size_t b : r.batch_sizes) {
    CHECK(b >= 1);
    CHECK(b <= 2 * c.k_select);
    model_fes += b;
  }
  CHECK(model_fes == 40 - 10 - 5);
  CHECK(r.batch_sizes.size() == r.iterations);
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].fe_index == i);
    CHECK(log[i].f == zdt1.evaluate(log[i].x));
    CHECK((log[i].iteration == 0) == (i < 15));
    if (i > 0) CHECK(log[i - 1].iteration <= log[i].iteration);
    for (std::size_t j = 0; j < i; ++j) CHECK(log[j].x != log[i].x);
  }
  // The probes are the lower corner and its one-at-a-time raises.
  CHECK(log[10].x == DecisionVector(4, 0.0));
  CHECK(log[11].x == DecisionVector{1, 0, 0, 0});

  const auto front = r.record.archive_objectives();
  for (const auto& u : front)
    for (const auto& v : front) CHECK_FALSE(dominates(u, v));
  CHECK(r.groups.groups[0] == std::vector<std::size_t>{0});
  CHECK(r.record.status == "ok");

  const auto again = run_saeame(zdt1, c, 11);
  CHECK(serialize(again.record) == serialize(r.record));
  CHECK(again.archive == r.archive);
  const auto other = run_saeame(zdt1, c, 12);
  CHECK(serialize(other.record) != serialize(r.record));
}
