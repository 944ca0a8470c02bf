#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "saea/gp.hpp"
#include "saea/rng.hpp"
#include "saea/types.hpp"

namespace saea::testing {

inline std::vector<ObjectiveVector> random_points(Rng& rng, std::size_t count, std::size_t m, double lo = 0.0,
                                                  double hi = 1.0) {
  std::vector<ObjectiveVector> pts(count, ObjectiveVector(m));
  for (auto& p : pts)
    for (double& v : p) v = rng.uniform(lo, hi);
  return pts;
}

// Points on a coarse integer grid, so duplicates and ties are common.
inline std::vector<ObjectiveVector> grid_points(Rng& rng, std::size_t count, std::size_t m, std::size_t levels) {
  std::vector<ObjectiveVector> pts(count, ObjectiveVector(m));
  for (auto& p : pts)
    for (double& v : p) v = static_cast<double>(rng.index(levels));
  return pts;
}

inline Eigen::MatrixXd random_inputs(Rng& rng, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
  return x;
}

// Dense reference GP: explicit kernel sums and a full inverse in extended
// precision, sharing no code with the library beyond the inputs.
struct DenseGp {
  using Real = long double;
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;
  double sigma_f, length, noise_var, mean;

  Real k(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
    Real sq = 0.0L;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const Real d = static_cast<Real>(a[i]) - static_cast<Real>(b[i]);
      sq += d * d;
    }
    const Real l = length;
    return static_cast<Real>(sigma_f) * sigma_f * std::exp(-sq / (2.0L * l * l));
  }
  Mat cov() const {
    const Eigen::Index n = inputs.rows();
    Mat c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        c(i, j) = k(inputs.row(i), inputs.row(j)) + (i == j ? static_cast<Real>(noise_var) : 0.0L);
    return c;
  }
  Vec residual() const { return targets.cast<Real>().array() - static_cast<Real>(mean); }
  std::pair<double, double> predict(const Eigen::RowVectorXd& z) const {
    const Mat inv = cov().inverse();
    Vec kz(inputs.rows());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) kz[i] = k(inputs.row(i), z);
    return {static_cast<double>(mean + kz.dot(inv * residual())), static_cast<double>(k(z, z) - kz.dot(inv * kz))};
  }
  double lml() const {
    const Mat c = cov();
    const Vec r = residual();
    const Real n = static_cast<Real>(r.size());
    return static_cast<double>(-0.5L * r.dot(c.inverse() * r) - 0.5L * std::log(c.determinant()) -
                               0.5L * n * std::log(2.0L * 3.14159265358979323846264338327950288L));
  }
};

inline double condition_number(const Eigen::MatrixXd& x, const KernelParams& p) {
  const Eigen::MatrixXd k = kernel_matrix(x, x, p) + Eigen::MatrixXd::Identity(x.rows(), x.rows()) * p.sigma_n * p.sigma_n;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
  return ev.maxCoeff() / std::max(ev.minCoeff(), 1e-300);
}

// A random GP instance whose covariance is well enough conditioned for a
// 1e-8 comparison against a dense inverse (condition number <= 1e6).
struct GpInstance {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  KernelParams params;
  double mean;
};

inline GpInstance random_gp_instance(Rng& rng, std::size_t max_n, std::size_t max_d) {
  while (true) {
    const std::size_t n = 1 + rng.index(max_n), d = 1 + rng.index(max_d);
    GpInstance inst{random_inputs(rng, n, d), Eigen::VectorXd(n), {}, rng.uniform(-1.0, 1.0)};
    for (Eigen::Index i = 0; i < inst.y.size(); ++i) inst.y[i] = rng.uniform(-2.0, 2.0);
    inst.params = {rng.uniform(0.5, 2.0), rng.uniform(0.1, 1.0), rng.coin() ? 0.0 : rng.uniform(0.01, 0.3)};
    if (condition_number(inst.x, inst.params) <= 1e6) return inst;
  }
}

// Effective noise the library adds: the first jitter level, relative to sigma_f^2.
inline double base_jitter(double sigma_f) { return kBaseJitter * sigma_f * sigma_f; }

}  // namespace saea::testing
