#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "saea/types.hpp"

namespace saea {

/// Squared-exponential kernel hyperparameters.
struct KernelParams {
  double sigma_f = 1.0;       // output scale
  double length_scale = 1.0;  // isotropic length-scale
  double sigma_n = 0.0;       // observation noise std-dev
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Relative diagonal jitter (times sigma_f^2) always added to the covariance.
inline constexpr double kBaseJitter = 1e-10;
/// Largest relative jitter tried before giving up on a factorization.
inline constexpr double kMaxJitter = 1e-4;

/// sigma_f^2 * exp(-|x - x'|^2 / (2 l^2)).
double kernel(std::span<const double> x, std::span<const double> x_prime, const KernelParams& params);

/// Exact GP regression model with a constant prior mean.
///
/// The covariance K + (sigma_n^2 + jitter) I is factorized once at fit time.
/// Inputs are rows of an N x d matrix; `feature_indices` records which
/// coordinates of a full decision vector feed the model (identity by default),
/// and is used by predict_projected().
class GpModel {
 public:
  static GpModel fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, const KernelParams& params, double mean_const,
                     std::vector<std::size_t> feature_indices = {});

  /// z must have d entries (already projected).
  Prediction predict(std::span<const double> z) const;
  /// Projects a full decision vector through feature_indices, then predicts.
  Prediction predict_projected(std::span<const double> x) const;
  /// Row-wise prediction for a Q x d matrix.
  void predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const;

  const KernelParams& params() const { return params_; }
  double mean_const() const { return mean_const_; }
  const Eigen::MatrixXd& train_inputs() const { return inputs_; }
  const Eigen::VectorXd& train_targets() const { return targets_; }
  /// Lower-triangular L with L L^T = K + (sigma_n^2 + jitter) I.
  const Eigen::MatrixXd& chol_factor() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const std::vector<std::size_t>& feature_indices() const { return features_; }
  /// Diagonal jitter actually used (absolute, excludes sigma_n^2).
  double jitter() const { return jitter_; }
  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(inputs_.cols()); }

 private:
  GpModel() = default;

  KernelParams params_;
  double mean_const_ = 0.0;
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  std::vector<std::size_t> features_;
  double jitter_ = 0.0;
};

/// Covariance matrix between the rows of a and b.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& params);

/// log p(f | X) computed from the Cholesky factor; same jitter policy as fit.
double log_marginal_likelihood(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                               const KernelParams& params, double mean_const);

struct HyperSearchConfig {
  std::size_t restarts = 5;
  std::size_t max_evals_per_start = 60;
  double tolerance = 1e-4;  // simplex spread in log-likelihood
  /// Extra start point, typically the previous fit's parameters.
  std::optional<KernelParams> warm_start;
};

/// Maximizes the log marginal likelihood over (l, sigma_f) with the mean fixed
/// at the target mean and sigma_n at zero (the jitter floor). Search box: l in
/// [1e-3, 1e3] x median pairwise input distance, sigma_f in [1e-3, 1e3] x
/// target std-dev. sigma_f is profiled out analytically; l is found by a
/// multi-start bounded Nelder-Mead in log space.
KernelParams optimize_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                      const HyperSearchConfig& config = {});

/// A GP over a subset of decision variables with inputs rescaled to the unit
/// box and targets standardized; predictions are reported in original units.
class Surrogate {
 public:
  static Surrogate fit(std::span<const DecisionVector> xs, std::span<const double> targets,
                       std::vector<std::size_t> features, const Bounds& bounds, const HyperSearchConfig& config = {});

  Prediction predict(std::span<const double> x) const;
  std::vector<Prediction> predict_batch(std::span<const DecisionVector> xs) const;

  const GpModel& model() const { return model_; }
  const std::vector<std::size_t>& features() const { return model_.feature_indices(); }

 private:
  Surrogate(GpModel model, std::vector<double> offset, std::vector<double> scale, double y_mean, double y_scale)
      : model_(std::move(model)), offset_(std::move(offset)), scale_(std::move(scale)), y_mean_(y_mean),
        y_scale_(y_scale) {}

  static Eigen::MatrixXd project(std::span<const DecisionVector> xs, const std::vector<std::size_t>& features,
                                 const std::vector<double>& offset, const std::vector<double>& scale);

  GpModel model_;
  std::vector<double> offset_;
  std::vector<double> scale_;
  double y_mean_;
  double y_scale_;
};

}  // namespace saea
