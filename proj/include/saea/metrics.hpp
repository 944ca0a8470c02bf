#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "saea/problems.hpp"
#include "saea/types.hpp"

namespace saea {

/// Exact hypervolume of the region dominated by `points` and bounded by `ref`
/// (minimization). Points not strictly better than ref in every objective add
/// nothing and are dropped. Uses a sweep for two objectives and the
/// exclusive-volume recursion otherwise; intended for up to six objectives.
double hypervolume(std::span<const ObjectiveVector> points, std::span<const double> ref);

/// HV(S) - HV(S \ {points[index]}), computed as the point's exclusive volume.
double hypervolume_contribution(std::span<const ObjectiveVector> points, std::span<const double> ref,
                                std::size_t index);

/// Contribution of every point.
std::vector<double> hypervolume_contributions(std::span<const ObjectiveVector> points, std::span<const double> ref);

/// Mean distance from each reference point to its nearest approximation point.
double igd(std::span<const ObjectiveVector> approximation, std::span<const ObjectiveVector> reference);
inline double igd(std::span<const ObjectiveVector> approximation, const ParetoFrontSample& reference) {
  return igd(approximation, reference.points);
}

/// Indices of the points no other point dominates. Exact duplicates are all kept.
std::vector<std::size_t> nondominated_indices(std::span<const ObjectiveVector> points);

enum class ShiftDirection { kNone, kALower, kAHigher };

struct RankSumResult {
  bool significant = false;
  ShiftDirection direction = ShiftDirection::kNone;
  double z = 0.0;        // normal-approximation statistic of sample a's rank sum
  double p_value = 1.0;  // two-sided
  double rank_sum_a = 0.0;
};

/// Two-sided Wilcoxon rank-sum test, normal approximation with tie and
/// continuity corrections. Each sample needs at least 5 values.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

}  // namespace saea
