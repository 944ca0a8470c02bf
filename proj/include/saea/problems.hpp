#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saea/rng.hpp"
#include "saea/types.hpp"

namespace saea {

enum class ProblemId { kZdt1, kZdt2, kZdt3, kZdt4, kZdt6, kDtlz1, kDtlz2, kDtlz3, kDtlz4, kDtlz5, kDtlz6, kDtlz7 };

/// Lowercase identifier used in config files and on the command line ("zdt1", "dtlz7", ...).
std::string_view to_string(ProblemId id);
/// Throws kUnsupported for unknown names.
ProblemId parse_problem_id(std::string_view name);
const std::vector<ProblemId>& all_problem_ids();

/// A box-constrained multi-objective minimization problem with a known
/// Pareto-optimal front. Instances are immutable and thread-safe.
class Problem {
 public:
  /// ZDT instances are bi-objective and need n >= 2. DTLZ instances default to
  /// three objectives and need n >= m; the last n - m + 1 variables form the
  /// distance group.
  Problem(ProblemId id, std::size_t n, std::optional<std::size_t> m = std::nullopt);

  ProblemId id() const { return id_; }
  std::string_view name() const { return to_string(id_); }
  std::size_t num_variables() const { return n_; }
  std::size_t num_objectives() const { return m_; }
  const Bounds& bounds() const { return bounds_; }

  /// Closed-form objective values. Rejects wrong lengths and out-of-box inputs.
  ObjectiveVector evaluate(std::span<const double> x) const;

 private:
  ObjectiveVector evaluate_zdt(std::span<const double> x) const;
  ObjectiveVector evaluate_dtlz(std::span<const double> x) const;

  ProblemId id_;
  std::size_t n_;
  std::size_t m_;
  Bounds bounds_;
};

struct ParetoFrontSample {
  std::vector<ObjectiveVector> points;
  std::size_t count() const { return points.size(); }
};

inline constexpr std::size_t kDefaultFrontSize = 1000;

/// `count` points on the analytic front. Bi-objective fronts use an evenly
/// spaced f1 grid over the optimal segments; three-objective fronts are drawn
/// uniformly from the simplex, sphere, curve or disconnected patches.
ParetoFrontSample sample_true_pf(const Problem& problem, std::size_t count, Rng& rng);

/// Fixed-seed reference front used for IGD so that every run of a problem is
/// scored against the same set.
ParetoFrontSample reference_front(const Problem& problem, std::size_t count = kDefaultFrontSize);

}  // namespace saea
