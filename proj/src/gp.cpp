#include "saea/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "saea/error.hpp"

namespace saea {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);
// Log-space simplex width below which a local search stops (1% in l).
constexpr double kSimplexSizeTol = 1e-2;

struct Factorization {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

// Cholesky of cov + (noise_var + jitter) I, escalating the relative jitter by
// 10x from kBaseJitter up to kMaxJitter.
std::optional<Factorization> factorize(Eigen::MatrixXd cov, double noise_var, double signal_var) {
  const Eigen::Index n = cov.rows();
  cov.diagonal().array() += noise_var;
  double added = 0.0;
  for (double rel = kBaseJitter; rel <= kMaxJitter * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * signal_var;
    cov.diagonal().array() += jitter - added;
    added = jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i) ok = std::isfinite(lower(i, i)) && lower(i, i) > 0.0;
    if (ok) return Factorization{std::move(lower), jitter};
  }
  return std::nullopt;
}

[[noreturn]] void factorization_failed(std::size_t n, const KernelParams& p) {
  std::ostringstream msg;
  msg << "covariance not positive definite after jitter escalation (N=" << n << ", sigma_f=" << p.sigma_f
      << ", l=" << p.length_scale << ", sigma_n=" << p.sigma_n << ", max jitter=" << kMaxJitter << " * sigma_f^2)";
  raise(ErrorCode::kNumericalFailure, msg.str());
}

void validate(const KernelParams& p) {
  require(p.sigma_f > 0.0 && std::isfinite(p.sigma_f), "sigma_f must be positive");
  require(p.length_scale > 0.0 && std::isfinite(p.length_scale), "length_scale must be positive");
  require(p.sigma_n >= 0.0 && std::isfinite(p.sigma_n), "sigma_n must be non-negative");
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

// Builds cov + (sigma_n^2 + jitter) I in the lower triangle of `work` and
// factorizes it in place, escalating the jitter like factorize().
bool factorize_in_place(const Eigen::MatrixXd& sqdist, const KernelParams& p, Eigen::MatrixXd& work) {
  const Eigen::Index n = sqdist.rows();
  const double sf2 = p.sigma_f * p.sigma_f;
  const double scale = -0.5 / (p.length_scale * p.length_scale);
  work.resize(n, n);
  for (double rel = kBaseJitter; rel <= kMaxJitter * (1.0 + 1e-9); rel *= 10.0) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index len = n - j;
      work.col(j).tail(len) = (sqdist.col(j).tail(len).array() * scale).exp() * sf2;
    }
    work.diagonal().array() += p.sigma_n * p.sigma_n + rel * sf2;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
    if (llt.info() != Eigen::Success) continue;
    const auto diag = work.diagonal().array();
    if ((diag > 0.0).all() && diag.isFinite().all()) return true;
  }
  return false;
}

// r^T K^-1 r and log |K| from a factor produced by factorize_in_place.
struct Quadratic {
  double quad = 0.0;
  double log_det = 0.0;
};

Quadratic quadratic_terms(const Eigen::MatrixXd& lower, const Eigen::VectorXd& residual) {
  const Eigen::VectorXd v = lower.triangularView<Eigen::Lower>().solve(residual);
  return {v.squaredNorm(), 2.0 * lower.diagonal().array().log().sum()};
}

double lml_from_distances(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& residual, const KernelParams& p) {
  Eigen::MatrixXd work;
  if (!factorize_in_place(sqdist, p, work)) factorization_failed(static_cast<std::size_t>(residual.size()), p);
  const Quadratic q = quadratic_terms(work, residual);
  return -0.5 * q.quad - 0.5 * q.log_det - 0.5 * static_cast<double>(residual.size()) * kLog2Pi;
}

// Bounded one-dimensional Nelder-Mead. Infinite values mark failed
// evaluations. Returns the best point seen and its value.
template <class F>
std::pair<double, double> nelder_mead_1d(F&& f, double start, double lo, double hi, double step,
                                         std::size_t max_evals, double tol) {
  const auto clip = [&](double p) { return std::clamp(p, lo, hi); };
  std::size_t evals = 0;
  const auto eval = [&](double p) {
    ++evals;
    return f(p);
  };
  std::array<double, 2> pts{clip(start), 0.0};
  pts[1] = clip(pts[0] + (pts[0] + step <= hi ? step : -step));
  std::array<double, 2> vals{eval(pts[0]), eval(pts[1])};

  while (evals < max_evals) {
    const int best = vals[1] < vals[0] ? 1 : 0, worst = 1 - best;
    if (std::isfinite(vals[worst]) &&
        (vals[worst] - vals[best] < tol || std::abs(pts[worst] - pts[best]) < kSimplexSizeTol))
      break;
    const double centroid = pts[best];
    const double reflected = clip(centroid + (centroid - pts[worst]));
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      const double expanded = clip(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = eval(expanded);
      pts[worst] = fe < fr ? expanded : reflected;
      vals[worst] = std::min(fe, fr);
      continue;
    }
    const bool outside = fr < vals[worst];
    const double contracted = centroid + 0.5 * ((outside ? reflected : pts[worst]) - centroid);
    const double fc = eval(contracted);
    pts[worst] = contracted;
    vals[worst] = fc;
  }
  return vals[1] < vals[0] ? std::pair{pts[1], vals[1]} : std::pair{pts[0], vals[0]};
}

double median_pairwise_distance(const Eigen::MatrixXd& sqdist) {
  const Eigen::Index n = sqdist.rows();
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) d.push_back(std::sqrt(sqdist(i, j)));
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace

double kernel(std::span<const double> x, std::span<const double> x_prime, const KernelParams& params) {
  require(x.size() == x_prime.size(), "kernel inputs differ in length");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_prime[i];
    sq += d * d;
  }
  return params.sigma_f * params.sigma_f * std::exp(-0.5 * sq / (params.length_scale * params.length_scale));
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& params) {
  require(a.cols() == b.cols(), "kernel inputs differ in dimension");
  const double sf2 = params.sigma_f * params.sigma_f;
  const double scale = -0.5 / (params.length_scale * params.length_scale);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = sf2 * std::exp(scale * (a.row(i) - b.row(j)).squaredNorm());
  return k;
}

GpModel GpModel::fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, const KernelParams& params, double mean_const,
                     std::vector<std::size_t> feature_indices) {
  validate(params);
  require(inputs.rows() >= 1 && inputs.cols() >= 1, "GP needs at least one training row and one input column");
  require(inputs.rows() == targets.size(), "GP inputs and targets differ in length");
  if (feature_indices.empty()) {
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) feature_indices.push_back(static_cast<std::size_t>(i));
  }
  require(feature_indices.size() == static_cast<std::size_t>(inputs.cols()),
          "feature_indices must name one variable per input column");

  const double sf2 = params.sigma_f * params.sigma_f;
  auto fac = factorize(kernel_matrix(inputs, inputs, params), params.sigma_n * params.sigma_n, sf2);
  if (!fac) factorization_failed(static_cast<std::size_t>(inputs.rows()), params);

  GpModel model;
  model.params_ = params;
  model.mean_const_ = mean_const;
  model.jitter_ = fac->jitter;
  model.chol_ = std::move(fac->lower);
  const Eigen::VectorXd residual = targets.array() - mean_const;
  const Eigen::VectorXd half = model.chol_.triangularView<Eigen::Lower>().solve(residual);
  model.alpha_ = model.chol_.transpose().triangularView<Eigen::Upper>().solve(half);
  model.inputs_ = std::move(inputs);
  model.targets_ = std::move(targets);
  model.features_ = std::move(feature_indices);
  return model;
}

Prediction GpModel::predict(std::span<const double> z) const {
  require(z.size() == dim(), "query has " + std::to_string(z.size()) + " entries, model expects " +
                                 std::to_string(dim()));
  Eigen::MatrixXd q(1, static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) q(0, static_cast<Eigen::Index>(i)) = z[i];
  Eigen::VectorXd mean, var;
  predict_batch(q, mean, var);
  return {mean[0], var[0]};
}

Prediction GpModel::predict_projected(std::span<const double> x) const {
  std::vector<double> z(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    require(features_[i] < x.size(), "decision vector too short for the model's feature indices");
    z[i] = x[features_[i]];
  }
  return predict(z);
}

void GpModel::predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const {
  require(queries.cols() == inputs_.cols(), "query dimension does not match the model");
  const Eigen::MatrixXd cross = kernel_matrix(inputs_, queries, params_);  // N x Q
  mean = (cross.transpose() * alpha_).array() + mean_const_;
  const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(cross);
  const double prior = params_.sigma_f * params_.sigma_f;
  variance = (prior - v.colwise().squaredNorm().array()).cwiseMax(0.0).matrix().transpose();
}

double log_marginal_likelihood(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                               const KernelParams& params, double mean_const) {
  validate(params);
  require(inputs.rows() >= 1 && inputs.rows() == targets.size(), "GP inputs and targets differ in length");
  const Eigen::VectorXd residual = targets.array() - mean_const;
  return lml_from_distances(squared_distances(inputs), residual, params);
}

KernelParams optimize_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                      const HyperSearchConfig& config) {
  require(inputs.rows() >= 2 && inputs.rows() == targets.size(), "hyperparameter search needs N >= 2");
  const Eigen::MatrixXd sqdist = squared_distances(inputs);
  const double mean = targets.mean();
  const Eigen::VectorXd residual = targets.array() - mean;
  const double n = static_cast<double>(targets.size());
  double std_dev = std::sqrt(residual.squaredNorm() / n);
  if (!(std_dev > 0.0)) std_dev = 1.0;
  const double dist = median_pairwise_distance(sqdist);

  const double ln10 = std::log(10.0);
  const double log_l0 = std::log(dist), log_sf0 = std::log(std_dev);
  const double l_lo = log_l0 - 3.0 * ln10, l_hi = log_l0 + 3.0 * ln10;
  const double sf_lo = log_sf0 - 3.0 * ln10, sf_hi = log_sf0 + 3.0 * ln10;

  // For fixed l the likelihood is maximized over sigma_f in closed form
  // (sigma_f^2 = r^T R^-1 r / N, clamped to its box), leaving a 1-D search.
  Eigen::MatrixXd work;
  double best_log_sf = log_sf0;
  const auto profiled = [&](double log_l, double& log_sf) {
    if (!factorize_in_place(sqdist, KernelParams{1.0, std::exp(log_l), 0.0}, work)) {
      return std::numeric_limits<double>::infinity();
    }
    const Quadratic q = quadratic_terms(work, residual);
    log_sf = std::clamp(0.5 * std::log(std::max(q.quad / n, 1e-300)), sf_lo, sf_hi);
    const double v = 0.5 * q.quad * std::exp(-2.0 * log_sf) + n * log_sf + 0.5 * q.log_det + 0.5 * n * kLog2Pi;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  const auto negative_lml = [&](double log_l) {
    double ignored = 0.0;
    return profiled(log_l, ignored);
  };

  // Deterministic start offsets (decades) around the data-scale length.
  static constexpr std::array<double, 5> kOffsets{0.0, -1.0, 1.0, -0.5, 0.5};
  std::vector<double> starts;
  if (config.warm_start) starts.push_back(std::log(config.warm_start->length_scale));
  for (std::size_t r = 0; r < config.restarts; ++r) {
    const double spread = 1.0 + static_cast<double>(r / kOffsets.size());
    starts.push_back(log_l0 + kOffsets[r % kOffsets.size()] * ln10 * spread);
  }

  double best_log_l = log_l0;
  double best_value = std::numeric_limits<double>::infinity();
  for (double start : starts) {
    auto [point, value] =
        nelder_mead_1d(negative_lml, start, l_lo, l_hi, 0.5 * ln10, config.max_evals_per_start, config.tolerance);
    if (value < best_value) {
      best_value = value;
      best_log_l = point;
    }
  }
  if (!std::isfinite(best_value)) {
    raise(ErrorCode::kNumericalFailure,
          "hyperparameter search: every start failed to factorize (N=" + std::to_string(targets.size()) + ")");
  }
  profiled(best_log_l, best_log_sf);
  return {std::exp(best_log_sf), std::exp(best_log_l), 0.0};
}

Surrogate Surrogate::fit(std::span<const DecisionVector> xs, std::span<const double> targets,
                         std::vector<std::size_t> features, const Bounds& bounds, const HyperSearchConfig& config) {
  require(!xs.empty() && xs.size() == targets.size(), "surrogate needs matching, non-empty inputs and targets");
  if (features.empty()) {
    for (std::size_t i = 0; i < bounds.size(); ++i) features.push_back(i);
  }
  std::vector<double> offset, scale;
  for (std::size_t f : features) {
    require(f < bounds.size(), "feature index outside the decision space");
    offset.push_back(bounds.lower[f]);
    scale.push_back(bounds.upper[f] - bounds.lower[f]);
  }

  double y_mean = 0.0;
  for (double t : targets) y_mean += t;
  y_mean /= static_cast<double>(targets.size());
  double y_var = 0.0;
  for (double t : targets) y_var += (t - y_mean) * (t - y_mean);
  double y_scale = std::sqrt(y_var / static_cast<double>(targets.size()));
  if (!(y_scale > 0.0)) y_scale = 1.0;

  Eigen::MatrixXd z = project(xs, features, offset, scale);
  Eigen::VectorXd y(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) y[static_cast<Eigen::Index>(i)] = (targets[i] - y_mean) / y_scale;

  KernelParams params = config.warm_start.value_or(KernelParams{1.0, 0.5, 0.0});
  if (xs.size() >= 2) params = optimize_hyperparameters(z, y, config);
  GpModel model = GpModel::fit(std::move(z), std::move(y), params, 0.0, std::move(features));
  return Surrogate(std::move(model), std::move(offset), std::move(scale), y_mean, y_scale);
}

Eigen::MatrixXd Surrogate::project(std::span<const DecisionVector> xs, const std::vector<std::size_t>& features,
                                   const std::vector<double>& offset, const std::vector<double>& scale) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(features.size()));
  for (std::size_t r = 0; r < xs.size(); ++r) {
    for (std::size_t c = 0; c < features.size(); ++c) {
      require(features[c] < xs[r].size(), "decision vector too short for the surrogate's features");
      z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (xs[r][features[c]] - offset[c]) / scale[c];
    }
  }
  return z;
}

Prediction Surrogate::predict(std::span<const double> x) const {
  const DecisionVector copy(x.begin(), x.end());
  return predict_batch(std::span<const DecisionVector>(&copy, 1)).front();
}

std::vector<Prediction> Surrogate::predict_batch(std::span<const DecisionVector> xs) const {
  Eigen::VectorXd mean, var;
  model_.predict_batch(project(xs, model_.feature_indices(), offset_, scale_), mean, var);
  std::vector<Prediction> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i].mean = y_mean_ + y_scale_ * mean[static_cast<Eigen::Index>(i)];
    out[i].variance = y_scale_ * y_scale_ * var[static_cast<Eigen::Index>(i)];
  }
  return out;
}

}  // namespace saea
